#include "burstcast/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace burstcast {

namespace {

double pick(const std::vector<double>& v, std::size_t g, const char* name) {
    if (v.empty()) throw std::invalid_argument(std::string("synth: ") + name + " is empty");
    return v.size() == 1 ? v[0] : v.at(g);
}

// Marsaglia–Tsang for shape >= 1, boosted for shape < 1.
double sample_gamma(Rng& rng, double shape) {
    if (shape < 1.0) return sample_gamma(rng, shape + 1.0) * std::pow(rng.uniform_open(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            // Box–Muller normal
            const double u1 = rng.uniform_open(), u2 = rng.uniform();
            x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

}  // namespace

double SynthConfig::base_rate_of(std::size_t g) const { return pick(base_rate, g, "base_rate"); }
double SynthConfig::amplitude_of(std::size_t g) const { return pick(amplitude, g, "amplitude"); }
double SynthConfig::phase_of(std::size_t g) const {
    if (phase.empty()) return 2.0 * std::numbers::pi * static_cast<double>(g) / static_cast<double>(n_geographies);
    return pick(phase, g, "phase");
}

void SynthConfig::validate() const {
    if (n_geographies == 0 || n_geographies > 12)
        throw std::invalid_argument("synth: n_geographies must lie in 1..12 (region grain)");
    if (n_weeks == 0) throw std::invalid_argument("synth: n_weeks must be positive");
    for (const auto* v : {&base_rate, &amplitude})
        if (v->size() != 1 && v->size() != n_geographies)
            throw std::invalid_argument("synth: per-geography vectors need 1 or n_geographies entries");
    if (!phase.empty() && phase.size() != 1 && phase.size() != n_geographies)
        throw std::invalid_argument("synth: phase needs 0, 1 or n_geographies entries");
    for (std::size_t g = 0; g < n_geographies; ++g) {
        if (!(base_rate_of(g) >= 0.0)) throw std::invalid_argument("synth: base rates must be >= 0");
        if (!(std::abs(amplitude_of(g)) <= 1.0))
            throw std::invalid_argument("synth: seasonal amplitude must satisfy |a| <= 1");
    }
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("synth: rho must lie in [0, 1)");
    if (!(eta >= 0.0)) throw std::invalid_argument("synth: eta must be >= 0");
    if (!(eta / (1.0 - rho) < 1.0))
        throw std::invalid_argument("synth: subcriticality violated, eta / (1 - rho) must be < 1");
    if (!(killed_mean >= 0.0 && wounded_mean >= 0.0))
        throw std::invalid_argument("synth: casualty means must be >= 0");
    if (emission == Emission::negative_binomial && !(nb_shape > 0.0))
        throw std::invalid_argument("synth: nb_shape must be positive");
}

long sample_poisson(Rng& rng, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("poisson: invalid mean");
    if (lambda == 0.0) return 0;
    if (lambda > 500.0) return sample_poisson(rng, lambda / 2.0) + sample_poisson(rng, lambda / 2.0);
    const double u = rng.uniform();
    double p = std::exp(-lambda);
    double F = p;
    long k = 0;
    const double cap = lambda + 60.0 * std::sqrt(lambda) + 100.0;
    while (u > F && k < cap) {
        ++k;
        p *= lambda / static_cast<double>(k);
        F += p;
    }
    return k;
}

long sample_geometric(Rng& rng, double mean) {
    if (mean <= 0.0) return 0;
    const double q = mean / (1.0 + mean);  // failure probability 1 - p
    return static_cast<long>(std::floor(std::log(rng.uniform_open()) / std::log(q)));
}

SynthOutput generate_panel(const SynthConfig& c) {
    c.validate();
    std::vector<WeekId> axis;
    for (long ord = iso_week(c.start).ordinal; axis.size() < c.n_weeks; ++ord) {
        const WeekId w = week_from_ordinal(ord);
        if (!in_gap_year(w)) axis.push_back(w);
    }

    const std::size_t G = c.n_geographies;
    const std::size_t T = axis.size();
    SynthOutput out;
    out.intensity.assign(G, std::vector<double>(T, 0.0));
    std::vector<std::vector<IncidentRecord>> per_geo(G);

#pragma omp parallel for schedule(static)
    for (std::size_t g = 0; g < G; ++g) {
        Rng counts_rng(derive_seed(c.seed, {g, 0}));
        Rng event_rng(derive_seed(c.seed, {g, 1}));
        const double mu = c.base_rate_of(g), a = c.amplitude_of(g), ph = c.phase_of(g);
        double excitation = 0.0;  // sum_{k<t} rho^{t-1-k} y_k
        for (std::size_t t = 0; t < T; ++t) {
            const double season = 1.0 + a * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 52.0 + ph);
            const double lam = mu * season + c.eta * excitation;
            out.intensity[g][t] = lam;
            double draw_mean = lam;
            if (c.emission == Emission::negative_binomial && lam > 0.0)
                draw_mean = sample_gamma(counts_rng, c.nb_shape) * lam / c.nb_shape;
            const long y = sample_poisson(counts_rng, draw_mean);
            excitation = c.rho * excitation + static_cast<double>(y);

            const auto monday = std::chrono::sys_days{axis[t].monday};
            for (long e = 0; e < y; ++e) {
                IncidentRecord r;
                r.date = Date{monday + std::chrono::days{static_cast<int>(event_rng.below(7))}};
                r.region_id = static_cast<int>(g + 1);
                r.country_id = 100 + static_cast<long>(g) + 1;
                r.killed = static_cast<double>(sample_geometric(event_rng, c.killed_mean));
                r.wounded = static_cast<double>(sample_geometric(event_rng, c.wounded_mean));
                char id[40];
                std::snprintf(id, sizeof id, "%04d%02u%02u%02zu%05ld", static_cast<int>(r.date.year()),
                              static_cast<unsigned>(r.date.month()), static_cast<unsigned>(r.date.day()), g + 1, e);
                r.event_id = id;
                per_geo[g].push_back(std::move(r));
            }
        }
    }

    for (auto& v : per_geo)
        for (auto& r : v) out.records.push_back(std::move(r));

    AggregateOptions opt;
    std::vector<long> geos(G);
    for (std::size_t g = 0; g < G; ++g) geos[g] = static_cast<long>(g) + 1;
    opt.geographies = geos;
    opt.first_week = axis.front().monday;
    opt.last_week = axis.back().monday;
    if (out.records.empty()) {
        // aggregate_weekly needs at least one record; build the empty panel directly.
        PanelSeries p;
        p.grain = Grain::region;
        p.geo_ids = geos;
        p.week_axis = axis;
        p.counts.assign(G, std::vector<long>(T, 0));
        p.casualties_total.assign(G, std::vector<double>(T, 0.0));
        p.killed = p.casualties_total;
        p.wounded = p.casualties_total;
        out.panel = std::move(p);
    } else {
        out.panel = aggregate_weekly(out.records, Grain::region, opt);
    }

    std::ostringstream csv;
    write_incidents_csv(csv, out.records);
    out.raw_csv = csv.str();
    return out;
}

}  // namespace burstcast
