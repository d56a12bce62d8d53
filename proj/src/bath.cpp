#include "helirot/bath.hpp"

#include "helirot/csv.hpp"
#include "helirot/errors.hpp"
#include "helirot/units.hpp"

#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include <cmath>
#include <sstream>

namespace helirot {

namespace {

constexpr double coverage_low_k = 1.3;
constexpr double coverage_high_k = 2.17;

// σ[Å²]·u[m/s] → cm³/s
double sigma_u_cm3_per_s(double sigma_a2, double u_mps) {
    return sigma_a2 * units::angstrom2_to_cm2 * u_mps * units::mps_to_cmps;
}

} // namespace

BathTable::BathTable(std::vector<BathProperties> rows, std::vector<std::string> provenance)
    : rows_(std::move(rows)), provenance_(std::move(provenance)) {
    if (rows_.size() < 4) {
        throw ValidationError("bath table: need at least four rows");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (i > 0 && !(r.t_k > rows_[i - 1].t_k)) {
            throw ValidationError("bath table: T not strictly increasing at row " + std::to_string(i));
        }
        if (!(r.t_k > 0.0) || !(r.density_cm3 > 0.0) || !(r.u1_mps > 0.0) || !(r.u2_mps >= 0.0) ||
            !(r.roton_gap_k > 0.0)) {
            throw ValidationError("bath table: non-physical value at row " + std::to_string(i));
        }
    }
    auto column = [&](double BathProperties::*field) {
        std::vector<double> x, y;
        for (const auto& r : rows_) {
            x.push_back(r.t_k);
            y.push_back(r.*field);
        }
        return std::function<double(double)>(
            boost::math::interpolators::pchip<std::vector<double>>(std::move(x), std::move(y)));
    };
    columns_.push_back(column(&BathProperties::density_cm3));
    columns_.push_back(column(&BathProperties::normal_fraction));
    columns_.push_back(column(&BathProperties::u1_mps));
    columns_.push_back(column(&BathProperties::u2_mps));
    columns_.push_back(column(&BathProperties::roton_gap_k));
}

BathTable BathTable::read(std::istream& in, const std::string& source) {
    const auto doc = read_csv(in, source);
    doc.require_columns({"T_K", "density_cm3", "normal_fraction", "u1_mps", "u2_mps", "roton_gap_K"});
    std::vector<BathProperties> rows;
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        rows.push_back({doc.number(r, 0), doc.number(r, 1), doc.number(r, 2), doc.number(r, 3), doc.number(r, 4),
                        doc.number(r, 5)});
    }
    return BathTable(std::move(rows), doc.comments);
}

BathTable BathTable::read_file(const std::filesystem::path& path) {
    const auto doc = read_csv_file(path);
    std::ostringstream buffer;
    write_csv(buffer, doc);
    std::istringstream in(buffer.str());
    return read(in, path.string());
}

BathProperties BathTable::at(double t_k) const {
    const auto [lo, hi] = range();
    if (!(t_k >= lo && t_k <= hi)) {
        std::ostringstream msg;
        msg << "bath table: T = " << t_k << " K outside tabulated range [" << lo << ", " << hi << "] K";
        throw RangeError(msg.str());
    }
    return {t_k, columns_[0](t_k), columns_[1](t_k), columns_[2](t_k), columns_[3](t_k), columns_[4](t_k)};
}

double BathTable::u2_maximum_temperature(std::size_t samples) const {
    const auto [lo, hi] = range();
    double best_t = lo;
    double best_u = -1.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
        const double u = columns_[3](t);
        if (u > best_u) {
            best_u = u;
            best_t = t;
        }
    }
    return best_t;
}

std::vector<std::string> check_bath_invariants(const BathTable& table) {
    std::vector<std::string> problems;
    const auto [lo, hi] = table.range();
    if (lo > coverage_low_k || hi < coverage_high_k) {
        std::ostringstream msg;
        msg << "coverage: table spans [" << lo << ", " << hi << "] K, must cover [" << coverage_low_k << ", "
            << coverage_high_k << "] K";
        problems.push_back(msg.str());
    }
    const auto& rows = table.rows();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].normal_fraction < 0.0 || rows[i].normal_fraction > 1.0) {
            problems.push_back("normal_fraction outside [0, 1] at row " + std::to_string(i));
        }
        if (i > 0 && rows[i].normal_fraction < rows[i - 1].normal_fraction) {
            problems.push_back("normal_fraction decreases at row " + std::to_string(i));
        }
    }
    const double t_max = table.u2_maximum_temperature();
    if (!(t_max > 1.4 && t_max < 1.8)) {
        std::ostringstream msg;
        msg << "u2: maximum at " << t_max << " K, expected inside (1.4, 1.8) K";
        problems.push_back(msg.str());
    }
    return problems;
}

// --- decoherence ----------------------------------------------------------------

DecoherenceModel parse_decoherence_model(const std::string& label) {
    if (label == "equilibrium") {
        return DecoherenceModel::Equilibrium;
    }
    if (label == "nonequilibrium-literal") {
        return DecoherenceModel::NonequilibriumLiteral;
    }
    if (label == "nonequilibrium-integrated") {
        return DecoherenceModel::NonequilibriumIntegrated;
    }
    throw ValidationError("unknown decoherence model '" + label + "'");
}

std::string to_string(DecoherenceModel model) {
    switch (model) {
    case DecoherenceModel::Equilibrium:
        return "equilibrium";
    case DecoherenceModel::NonequilibriumLiteral:
        return "nonequilibrium-literal";
    case DecoherenceModel::NonequilibriumIntegrated:
        return "nonequilibrium-integrated";
    }
    return "unknown";
}

void DecoherenceParams::validate() const {
    if (!(sigma_a2 > 0.0) || !(w_nm > 0.0)) {
        throw ValidationError("decoherence: sigma and w must be positive");
    }
}

double gamma_equilibrium(const BathTable& table, double t_k, double sigma_a2) {
    const auto p = table.at(t_k);
    return p.density_cm3 * p.normal_fraction * sigma_u_cm3_per_s(sigma_a2, p.u1_mps) * 1e-9;
}

double ld_equilibrium(const BathTable& table, double t_k, double t_ps, double sigma_a2, double ld0) {
    return ld0 * std::exp(-gamma_equilibrium(table, t_k, sigma_a2) * t_ps * 1e-3);
}

double n_neq(const BathTable& table, double t_k, double t_ps, double w_nm) {
    const auto p = table.at(t_k);
    const double x = units::distance_nm(p.u2_mps, t_ps) / w_nm;
    return p.density_cm3 * std::exp(-x * x);
}

double n_neq_integral(const BathTable& table, double t_k, double t_ps, double w_nm) {
    const auto p = table.at(t_k);
    const double a = units::distance_nm(p.u2_mps, 1.0) / w_nm; // 1/ps
    if (a * t_ps < 1e-8) {
        return p.density_cm3 * t_ps;
    }
    return p.density_cm3 * std::sqrt(units::pi) / (2.0 * a) * std::erf(a * t_ps);
}

double gamma_nonequilibrium(const BathTable& table, double t_k, double t_ps, double sigma_a2, double w_nm) {
    const auto p = table.at(t_k);
    return n_neq(table, t_k, t_ps, w_nm) * sigma_u_cm3_per_s(sigma_a2, p.u1_mps) * 1e-9;
}

double ld_nonequilibrium(const BathTable& table, double t_k, double t_ps, double sigma_a2, double w_nm, double ld0,
                         DecoherenceModel variant) {
    switch (variant) {
    case DecoherenceModel::Equilibrium:
        return ld_equilibrium(table, t_k, t_ps, sigma_a2, ld0);
    case DecoherenceModel::NonequilibriumLiteral:
        return ld0 * std::exp(-gamma_nonequilibrium(table, t_k, t_ps, sigma_a2, w_nm) * t_ps * 1e-3);
    case DecoherenceModel::NonequilibriumIntegrated: {
        const auto p = table.at(t_k);
        const double exponent =
            sigma_u_cm3_per_s(sigma_a2, p.u1_mps) * n_neq_integral(table, t_k, t_ps, w_nm) * units::ps_to_s;
        return ld0 * std::exp(-exponent);
    }
    }
    throw ValidationError("unknown decoherence variant");
}

double ld_model(const BathTable& table, double t_k, double t_ps, const DecoherenceParams& params, double ld0) {
    return ld_nonequilibrium(table, t_k, t_ps, params.sigma_a2, params.w_nm, ld0, params.model);
}

double gamma_model(const BathTable& table, double t_k, double t_ps, const DecoherenceParams& params) {
    if (params.model == DecoherenceModel::Equilibrium) {
        return gamma_equilibrium(table, t_k, params.sigma_a2);
    }
    return gamma_nonequilibrium(table, t_k, t_ps, params.sigma_a2, params.w_nm);
}

// --- annihilation ---------------------------------------------------------------

void AnnihilationParams::validate() const {
    if (!(n0_cm3 > 0.0) || !(k_ref_cm3_per_s > 0.0) || !(t_ref_k > 0.0)) {
        throw ValidationError("annihilation: N0, K_ref and T_ref must be positive");
    }
}

double roton_density_factor(const BathTable& table, double t_k) {
    const auto p = table.at(t_k);
    return std::sqrt(t_k) * std::exp(-p.roton_gap_k / t_k);
}

double annihilation_rate(const BathTable& table, double t_k, const AnnihilationParams& params) {
    params.validate();
    return params.k_ref_cm3_per_s * roton_density_factor(table, params.t_ref_k) / roton_density_factor(table, t_k);
}

double bimolecular_density(const BathTable& table, double t_s, double t_k, const AnnihilationParams& params) {
    if (!(t_s >= 0.0)) {
        throw ValidationError("bimolecular density: t must be non-negative");
    }
    const double k = annihilation_rate(table, t_k, params);
    return params.n0_cm3 / (1.0 + k * params.n0_cm3 * t_s);
}

SeparationEstimate separation_and_displacement(double density_cm3, double diffusion_cm2_per_s, double t_s) {
    if (!(density_cm3 > 0.0) || !(diffusion_cm2_per_s > 0.0) || !(t_s >= 0.0)) {
        throw ValidationError("separation: density and D must be positive, t non-negative");
    }
    return {std::cbrt(1.0 / density_cm3) / units::nm_to_cm,
            std::sqrt(6.0 * diffusion_cm2_per_s * t_s) / units::nm_to_cm};
}

} // namespace helirot
