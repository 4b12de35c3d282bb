#pragma once

// Fig.-4/5 pipeline pieces, computed once per (alpha, mode) per test process.

#include "oracles.hpp"

#include "hetnet/content.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/traffic.hpp"

#include <map>
#include <memory>
#include <utility>

namespace fixture {

struct Pipeline {
    hetnet::NetworkConfig cfg;
    hetnet::ContentConfig content;
    std::unique_ptr<hetnet::Association> assoc;
    hetnet::AssocProbs probs;
    hetnet::ActiveIntensities act;
    hetnet::RateTable rates;
    hetnet::Matrix84 d{};
};

inline const Pipeline& fig4(double alpha, bool clustered = true) {
    static std::map<std::pair<double, bool>, std::unique_ptr<Pipeline>> cache;
    auto& slot = cache[{alpha, clustered}];
    if (!slot) {
        slot = std::make_unique<Pipeline>();
        auto& p = *slot;
        p.cfg = clustered ? oracle::fig4(alpha) : oracle::fig4(alpha).baseline();
        p.assoc = std::make_unique<hetnet::Association>(p.cfg);
        p.probs = p.assoc->all();
        hetnet::Popularity pop(p.content);
        p.act = hetnet::active_intensities(p.cfg, p.probs, pop);
        p.rates = hetnet::RateModel(*p.assoc, p.act).table();
        p.d = hetnet::state_matrix(p.cfg, p.probs, pop);
    }
    return *slot;
}

} // namespace fixture
