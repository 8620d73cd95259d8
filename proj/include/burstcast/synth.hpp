#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "burstcast/core/calendar.hpp"
#include "burstcast/core/rng.hpp"
#include "burstcast/ingest.hpp"

namespace burstcast {

enum class Emission { poisson, negative_binomial };

/// Discrete self-exciting weekly count process per geography:
///   lambda_{g,t} = mu_g (1 + a_g sin(2 pi t / 52 + phase_g)) + eta sum_{k<t} rho^{t-1-k} y_{g,k}
struct SynthConfig {
    std::size_t n_geographies = 12;
    std::size_t n_weeks = 1200;
    /// Per-geography base rate; a single entry applies to every geography.
    std::vector<double> base_rate{2.0};
    /// Per-geography seasonal amplitude; single entry broadcasts.
    std::vector<double> amplitude{0.5};
    /// Per-geography phase in radians; empty means 2 pi g / n_geographies.
    std::vector<double> phase;
    double eta = 0.25;
    double rho = 0.5;
    double killed_mean = 1.5;
    double wounded_mean = 3.0;
    Emission emission = Emission::poisson;
    /// Gamma shape of the negative-binomial mixture (variance lambda + lambda^2 / k).
    double nb_shape = 2.0;
    Date start = Date{std::chrono::year{1970}, std::chrono::month{1}, std::chrono::day{5}};
    std::uint64_t seed = 42;

    double base_rate_of(std::size_t g) const;
    double amplitude_of(std::size_t g) const;
    double phase_of(std::size_t g) const;

    /// Throws std::invalid_argument naming the violated condition, including
    /// the stability requirement eta / (1 - rho) < 1.
    void validate() const;
};

struct SynthOutput {
    PanelSeries panel;
    std::vector<IncidentRecord> records;
    /// [geo][week] intensity the counts were drawn from.
    std::vector<std::vector<double>> intensity;
    /// Incident rows in the default ingest schema.
    std::string raw_csv;
};

/// Region-grain panel with geographies 1..n on an axis of n_weeks Mondays
/// starting at `start` (gap-year weeks skipped). Deterministic in the seed.
SynthOutput generate_panel(const SynthConfig& config);

/// Seeded Poisson draw by inverse transform; large means are split.
long sample_poisson(Rng& rng, double lambda);

/// Failures before the first success with success probability 1 / (1 + mean).
long sample_geometric(Rng& rng, double mean);

}  // namespace burstcast
