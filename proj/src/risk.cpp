#include "exlab/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "exlab/error.hpp"

namespace exlab {

double sup_norm(std::span<const double> x) noexcept {
    double m = 0.0;
    for (double v : x) m = std::max(m, v);
    return m;
}

RiskFunctional RiskFunctional::sup_norm() { return {RiskKind::SupNorm, "sup", {}}; }

RiskFunctional RiskFunctional::coordinate() { return {RiskKind::Coordinate, "coordinate", {}}; }

RiskFunctional RiskFunctional::argmax_coordinate() {
    return {RiskKind::ArgmaxCoordinate, "argmax", {}};
}

RiskFunctional RiskFunctional::weight_table(std::vector<std::vector<double>> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw ValidationError("risk table: empty weight table");
    std::ostringstream name;
    name << "table:";
    for (std::size_t s = 0; s < n; ++s) {
        if (weights[s].size() != n) throw ValidationError("risk table: weight table must be square");
        for (std::size_t k = 0; k < n; ++k) {
            const double w = weights[s][k];
            if (!std::isfinite(w) || w < 0.0)
                throw ValidationError("risk table: weights must be finite and non-negative");
            name << (k ? "," : "") << w;
        }
        if (s + 1 < n) name << "/";
    }
    auto fn = [w = std::move(weights)](std::size_t site, std::span<const double> x) {
        double r = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) r = std::max(r, w[site][k] * x[k]);
        return r;
    };
    RiskFunctional risk{RiskKind::UserTable, name.str(), std::move(fn)};
    validate_homogeneity(risk, n, 1000, 0x5eed);
    return risk;
}

RiskFunctional RiskFunctional::custom(std::string name, std::size_t site_count, Callable fn) {
    if (!fn) throw ValidationError("risk: empty custom functional");
    RiskFunctional risk{RiskKind::UserTable, std::move(name), std::move(fn)};
    validate_homogeneity(risk, site_count, 1000, 0x5eed);
    return risk;
}

RiskFunctional RiskFunctional::from_name(const std::string& name, std::size_t site_count) {
    if (name == "sup" || name == "SupNorm") return sup_norm();
    if (name == "coordinate" || name == "Coordinate") return coordinate();
    if (name == "argmax" || name == "ArgmaxCoordinate") return argmax_coordinate();
    if (name.rfind("table:", 0) == 0) {
        std::vector<std::vector<double>> rows;
        std::stringstream body(name.substr(6));
        std::string row;
        while (std::getline(body, row, '/')) {
            std::vector<double> entries;
            std::stringstream cells(row);
            std::string cell;
            while (std::getline(cells, cell, ',')) {
                try {
                    entries.push_back(std::stod(cell));
                } catch (const std::exception&) {
                    throw ValidationError("risk: bad table entry '" + cell + "'");
                }
            }
            rows.push_back(std::move(entries));
        }
        if (rows.size() != site_count)
            throw ValidationError("risk: table has " + std::to_string(rows.size()) + " rows but model has " +
                                  std::to_string(site_count) + " sites");
        return weight_table(std::move(rows));
    }
    throw ValidationError("risk: unknown functional '" + name + "'");
}

double RiskFunctional::operator()(std::size_t site, std::span<const double> x) const {
    if (site >= x.size())
        throw ValidationError("risk: unknown site " + std::to_string(site) + " (vector has " +
                              std::to_string(x.size()) + " sites)");
    switch (kind_) {
        case RiskKind::SupNorm:
            return exlab::sup_norm(x);
        case RiskKind::Coordinate:
            return x[site];
        case RiskKind::ArgmaxCoordinate: {
            // Ties go to the lowest index. The common factor makes exact ties
            // at the maximum an event of positive probability.
            const double v = x[site];
            for (std::size_t k = 0; k < x.size(); ++k)
                if (x[k] > v || (k < site && x[k] == v)) return 0.0;
            return v;
        }
        case RiskKind::UserTable:
            return fn_(site, x);
    }
    return 0.0;
}

double eval_risk(const RiskFunctional& risk, std::size_t site, std::span<const double> x) {
    return risk(site, x);
}

void validate_homogeneity(const RiskFunctional& risk, std::size_t site_count, std::size_t probes,
                          std::uint64_t seed, double tolerance) {
    CounterRng rng(seed, Stream::RiskProbe, 0);
    std::vector<double> x(site_count);
    std::vector<double> cx(site_count);
    for (std::size_t p = 0; p < probes; ++p) {
        for (double& v : x) v = rng.uniform() * 10.0;
        const double c = std::exp(std::log(1e-3) + rng.uniform() * std::log(1e6));
        for (std::size_t k = 0; k < site_count; ++k) cx[k] = c * x[k];
        const double scale = c * std::max(sup_norm(x), 1e-300);
        for (std::size_t s = 0; s < site_count; ++s) {
            const double lhs = risk(s, cx);
            const double rhs = c * risk(s, x);
            if (!std::isfinite(lhs) || lhs < 0.0)
                throw ValidationError("risk '" + risk.name() + "': must be finite and non-negative");
            if (std::abs(lhs - rhs) > tolerance * std::max(std::abs(rhs), scale))
                throw ValidationError("risk '" + risk.name() + "': not positively homogeneous (r(cx) = " +
                                      std::to_string(lhs) + ", c r(x) = " + std::to_string(rhs) + ")");
        }
    }
}

RiskBoundCertificate certify_risk_bound(const RiskFunctional& risk, std::size_t site_count,
                                        double u_candidate, std::size_t probes, CounterRng& rng) {
    if (!(u_candidate > 0.0)) throw ValidationError("certify_risk_bound: u must be > 0");
    if (site_count == 0) throw ValidationError("certify_risk_bound: need at least one site");

    std::vector<double> x(site_count);
    std::vector<double> witness;
    double worst = 0.0;
    std::size_t worst_site = 0;
    std::size_t count = 0;

    auto probe = [&] {
        const double norm = sup_norm(x);
        for (std::size_t s = 0; s < site_count; ++s) {
            const double ratio = risk(s, x) / norm;
            if (ratio > worst || witness.empty()) {
                worst = ratio;
                worst_site = s;
                witness = x;
            }
        }
        ++count;
    };

    for (std::size_t s = 0; s < site_count; ++s) {
        std::fill(x.begin(), x.end(), 0.0);
        x[s] = 1.0;
        probe();
    }
    std::fill(x.begin(), x.end(), 1.0);
    probe();
    while (count < probes) {
        for (double& v : x) v = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
        x[rng.index(site_count)] = 1.0;
        const double norm = sup_norm(x);
        for (double& v : x) v /= norm;
        probe();
    }

    if (worst > u_candidate) throw RiskBoundViolation(u_candidate, worst, worst_site, witness);
    return {u_candidate, worst, count};
}

MarkFunctional MarkFunctional::same_as_risk() { return {MarkKind::SameAsRisk, "risk", std::nullopt, {}}; }

MarkFunctional MarkFunctional::affected_fraction(std::optional<double> threshold) {
    if (threshold && !(*threshold > 0.0))
        throw ValidationError("mark: affected-fraction threshold must be > 0");
    return {MarkKind::AffectedFraction, "affected-fraction", threshold, {}};
}

MarkFunctional MarkFunctional::custom(std::string name, Callable fn) {
    if (!fn) throw ValidationError("mark: empty custom functional");
    return {MarkKind::UserTable, std::move(name), std::nullopt, std::move(fn)};
}

MarkFunctional MarkFunctional::from_name(const std::string& name) {
    if (name == "risk" || name == "same-as-risk" || name == "SameAsRisk") return same_as_risk();
    if (name == "affected-fraction" || name == "AffectedFraction") return affected_fraction();
    if (name.rfind("affected-fraction:", 0) == 0) {
        try {
            return affected_fraction(std::stod(name.substr(18)));
        } catch (const std::invalid_argument&) {
            throw ValidationError("mark: bad threshold in '" + name + "'");
        }
    }
    throw ValidationError("mark: unknown functional '" + name + "'");
}

double MarkFunctional::evaluate(const RiskFunctional& risk, double u, std::size_t site,
                                std::span<const double> x) const {
    switch (kind_) {
        case MarkKind::SameAsRisk:
            return risk(site, x);
        case MarkKind::AffectedFraction: {
            if (!(u > 0.0)) throw ValidationError("mark: u must be > 0");
            const double level = threshold_.value_or(u);
            std::size_t hits = 0;
            for (std::size_t s = 0; s < x.size(); ++s)
                if (risk(s, x) > level) ++hits;
            return static_cast<double>(hits) / static_cast<double>(x.size());
        }
        case MarkKind::UserTable:
            return fn_(site, x);
    }
    return 0.0;
}

double eval_mark(const MarkFunctional& mark, const RiskFunctional& risk, double u, std::size_t site,
                 std::span<const double> x) {
    return mark.evaluate(risk, u, site, x);
}

}  // namespace exlab
