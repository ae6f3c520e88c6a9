#include "eklab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>

#include <nlohmann/json.hpp>

#include "eklab/adversary.hpp"
#include "eklab/arith.hpp"
#include "eklab/errors.hpp"
#include "eklab/kubilius.hpp"
#include "eklab/qlinalg.hpp"
#include "eklab/rat.hpp"
#include "eklab/reals.hpp"
#include "eklab/stats.hpp"

namespace eklab::experiments {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::uint64_t kModelDraws = 100000;
constexpr double kNormalDensitySup = 0.3989422804014327; // 1/sqrt(2 pi)

struct KindName {
    ExperimentKind kind;
    std::string_view name;
};
constexpr KindName kKindNames[] = {
    {ExperimentKind::ek_single, "ek_single"},
    {ExperimentKind::ek_joint, "ek_joint"},
    {ExperimentKind::moments, "moments"},
    {ExperimentKind::quantitative, "quantitative"},
    {ExperimentKind::kubilius, "kubilius"},
    {ExperimentKind::adversary, "adversary"},
    {ExperimentKind::relations, "relations"},
    {ExperimentKind::coprimality, "coprimality"},
};

std::string fmt_real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string int_text(const Int& v) { return v.get_str(); }

void push_diag(ExperimentResult& res, std::string key, std::string value) {
    res.diagnostics.emplace_back(std::move(key), std::move(value));
}

std::vector<reals::BeattySpec> parse_specs(const ExperimentConfig& cfg, std::size_t min_k,
                                           std::size_t max_k) {
    const std::size_t k = cfg.alphas.size();
    if (k < min_k || k > max_k)
        throw validation_error(std::string(experiment_name(cfg.experiment)) + " takes between " +
                               std::to_string(min_k) + " and " + std::to_string(max_k) +
                               " slopes, got " + std::to_string(k));
    if (cfg.betas.size() > k)
        throw validation_error("more shifts than slopes");
    std::vector<reals::BeattySpec> specs;
    specs.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::string beta = i < cfg.betas.size() ? cfg.betas[i] : std::string("rational:0");
        specs.push_back(reals::BeattySpec::parse(cfg.alphas[i], beta));
    }
    return specs;
}

// omega of |floor(alpha_i n + beta_i)| for n in [1, N]; values 0 and 1 count 0
struct OmegaSample {
    std::vector<std::vector<double>> raw; // N rows of k
    std::uint64_t sieve_hi = 0;
};

OmegaSample omega_sample(const std::vector<reals::BeattySpec>& specs, std::uint64_t N,
                         const std::string& cache_dir) {
    const std::size_t k = specs.size();
    std::vector<std::vector<std::int64_t>> floors(k);
    std::int64_t max_abs = 1;
    for (std::size_t i = 0; i < k; ++i) {
        floors[i] = reals::beatty_floor_range(specs[i], 1, N);
        for (std::int64_t v : floors[i]) max_abs = std::max(max_abs, std::abs(v));
    }
    OmegaSample out;
    out.sieve_hi = static_cast<std::uint64_t>(max_abs) + 1;
    const arith::FactorTable tab =
        cache_dir.empty() ? arith::omega_range(1, out.sieve_hi)
                          : arith::omega_range_cached(1, out.sieve_hi, fs::path(cache_dir));
    out.raw.assign(N, std::vector<double>(k, 0.0));
    for (std::uint64_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < k; ++i) {
            const std::uint64_t v = static_cast<std::uint64_t>(std::abs(floors[i][n]));
            out.raw[n][i] = v <= 1 ? 0.0 : static_cast<double>(tab.omega_at(v));
        }
    return out;
}

Rat parse_rat_text(const std::string& text, const char* what) {
    mpq_class q;
    if (q.set_str(text, 10) != 0)
        throw validation_error(std::string(what) + ": cannot parse rational '" + text + "'");
    if (q.get_den() == 0) throw validation_error(std::string(what) + ": zero denominator");
    q.canonicalize();
    return q;
}

// ---- kubilius helpers ------------------------------------------------------

kubilius::KubiliusModel build_model(const reals::CertifiedReal& alpha, std::uint64_t N,
                                    std::uint64_t seed, const std::optional<std::uint64_t>& R) {
    if (!R) return kubilius::model_for_slope(alpha, N, seed);
    if (*R < 2 || *R > N)
        throw validation_error("prime cutoff override must satisfy 2 <= R <= N");
    const Int height(static_cast<unsigned long>(arith::ceil_root(N, 8)));
    const Rat approx = reals::best_rational_of_height(alpha, height);
    const arith::PrimeSets sets = arith::build_prime_sets(N, *R, std::span(&approx, 1));
    if (sets.good.empty())
        throw validation_error("prime cutoff override leaves no model primes");
    return kubilius::KubiliusModel::make(sets.good, seed);
}

std::vector<std::uint64_t> value_histogram(std::span<const std::uint64_t> values) {
    std::uint64_t top = 0;
    for (std::uint64_t v : values) top = std::max(top, v);
    std::vector<std::uint64_t> hist(top + 1, 0);
    for (std::uint64_t v : values) ++hist[v];
    return hist;
}

std::complex<double> standardized_char(const std::vector<std::uint64_t>& hist, std::uint64_t n,
                                       double s, double t) {
    const double rs = std::sqrt(s);
    std::complex<double> acc = 0;
    for (std::size_t v = 0; v < hist.size(); ++v) {
        if (hist[v] == 0) continue;
        const double x = t * (static_cast<double>(v) - s) / rs;
        acc += static_cast<double>(hist[v]) *
               std::polar(1.0, 2.0 * std::numbers::pi * x);
    }
    return acc / static_cast<double>(n);
}

double model_sample_dk(const std::vector<std::uint64_t>& values, double s) {
    stats::StandardizedSample ss;
    ss.k = 1;
    ss.N = values.size();
    ss.center = {s};
    ss.scale = {std::sqrt(s)};
    ss.values.reserve(values.size());
    for (std::uint64_t v : values)
        ss.values.push_back({(static_cast<double>(v) - s) / ss.scale[0]});
    return stats::empirical_dK(ss);
}

struct EsseenRun {
    double A = 0;
    double bound = 0;
    double model_dk = 0;
};

EsseenRun esseen_run(const kubilius::KubiliusModel& model,
                     const std::vector<std::uint64_t>& values) {
    EsseenRun out;
    out.A = std::sqrt(model.s) / 2.0;
    const std::vector<std::uint64_t> hist = value_histogram(values);
    const std::size_t points = 2049; // spacing A/1024, well under the A/512 cap
    std::vector<std::pair<double, std::complex<double>>> rows(points);
    for (std::size_t j = 0; j < points; ++j) {
        const double t = -out.A + 2.0 * out.A * static_cast<double>(j) /
                                      static_cast<double>(points - 1);
        rows[j] = {t, standardized_char(hist, values.size(), model.s, t)};
    }
    out.bound = kubilius::esseen_bound(rows, out.A, kNormalDensitySup);
    out.model_dk = model_sample_dk(values, model.s);
    return out;
}

Table char_table(const kubilius::KubiliusModel& model,
                 const std::vector<std::uint64_t>& values) {
    std::vector<double> grid(129);
    for (std::size_t j = 0; j < grid.size(); ++j)
        grid[j] = -0.5 + static_cast<double>(j) / 128.0;
    const std::vector<kubilius::CharRow> rows = kubilius::char_compare(model, values, grid);
    Table t;
    t.name = "char";
    t.columns = {"t", "exact_re", "exact_im", "empirical_re", "empirical_im", "diff"};
    for (const kubilius::CharRow& r : rows)
        t.rows.push_back({Cell::of(r.t), Cell::of(r.exact.real()), Cell::of(r.exact.imag()),
                          Cell::of(r.empirical.real()), Cell::of(r.empirical.imag()),
                          Cell::of(r.diff)});
    return t;
}

// ---- experiment runners ----------------------------------------------------

void run_ek_single(const ExperimentConfig& cfg, ExperimentResult& res) {
    const auto specs = parse_specs(cfg, 1, 1);
    const OmegaSample om = omega_sample(specs, cfg.N, cfg.cache_dir);
    const stats::StandardizedSample sample = stats::standardize(om.raw, cfg.N);
    const double dk = stats::empirical_dK(sample);

    Table summary;
    summary.name = "summary";
    summary.columns = {"n", "d_k", "center", "scale"};
    summary.rows.push_back({Cell::of_int(static_cast<long long>(cfg.N)), Cell::of(dk),
                            Cell::of(sample.center[0]), Cell::of(sample.scale[0])});
    res.tables.push_back(std::move(summary));

    std::vector<double> z(cfg.N);
    for (std::uint64_t n = 0; n < cfg.N; ++n) z[n] = sample.values[n][0];
    std::sort(z.begin(), z.end());
    Table cdf;
    cdf.name = "cdf";
    cdf.columns = {"z", "f_emp", "phi"};
    for (std::uint64_t i = 0; i < cfg.N; ++i)
        cdf.rows.push_back({Cell::of(z[i]),
                            Cell::of(static_cast<double>(i + 1) / static_cast<double>(cfg.N)),
                            Cell::of(stats::gaussian_cdf(z[i]))});
    res.tables.push_back(std::move(cdf));
    push_diag(res, "sieve_hi", std::to_string(om.sieve_hi));
}

void run_ek_joint(const ExperimentConfig& cfg, ExperimentResult& res) {
    const auto specs = parse_specs(cfg, 2, 4);
    const std::size_t k = specs.size();
    const OmegaSample om = omega_sample(specs, cfg.N, cfg.cache_dir);
    const stats::StandardizedSample sample = stats::standardize(om.raw, cfg.N);

    // largest lattice within multivariate_dK's k log2(grid+1) <= 24 budget
    std::uint64_t grid = std::min<std::uint64_t>(64, (std::uint64_t(1) << (24 / k)) - 1);
    const double dk = stats::multivariate_dK(sample, grid);

    Table summary;
    summary.name = "summary";
    summary.columns = {"n", "k", "grid", "d_orthant"};
    summary.rows.push_back({Cell::of_int(static_cast<long long>(cfg.N)),
                            Cell::of_int(static_cast<long long>(k)),
                            Cell::of_int(static_cast<long long>(grid)), Cell::of(dk)});
    res.tables.push_back(std::move(summary));

    Table moments2;
    moments2.name = "moments2";
    moments2.columns = {"i", "j", "value"};
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            stats::MomentIndex idx;
            idx.ell.assign(k, 0);
            idx.ell[i] += 1;
            idx.ell[j] += 1;
            moments2.rows.push_back({Cell::of_int(static_cast<long long>(i + 1)),
                                     Cell::of_int(static_cast<long long>(j + 1)),
                                     Cell::of(stats::mixed_moment_empirical(sample, idx))});
        }
    res.tables.push_back(std::move(moments2));

    Table st;
    st.name = "sample";
    for (std::size_t i = 1; i <= k; ++i) st.columns.push_back("z_" + std::to_string(i));
    for (std::uint64_t n = 0; n < cfg.N; ++n) {
        std::vector<Cell> row;
        row.reserve(k);
        for (std::size_t i = 0; i < k; ++i) row.push_back(Cell::of(sample.values[n][i]));
        st.rows.push_back(std::move(row));
    }
    res.tables.push_back(std::move(st));
    push_diag(res, "sieve_hi", std::to_string(om.sieve_hi));
    push_diag(res, "orthant_grid", std::to_string(grid));
}

void enumerate_indices(std::vector<unsigned>& ell, std::size_t pos, unsigned budget,
                       const std::function<void()>& emit) {
    if (pos + 1 == ell.size()) {
        for (unsigned v = 0; v <= budget; ++v) {
            ell[pos] = v;
            emit();
        }
        return;
    }
    for (unsigned v = 0; v <= budget; ++v) {
        ell[pos] = v;
        enumerate_indices(ell, pos + 1, budget - v, emit);
    }
}

void run_moments(const ExperimentConfig& cfg, ExperimentResult& res) {
    const auto specs = parse_specs(cfg, 1, 3);
    const std::size_t k = specs.size();
    const unsigned cap = static_cast<unsigned>(cfg.L.value_or(4));
    if (cap > 12) throw validation_error("moment cap beyond 12 is not meaningful at desk scale");
    const OmegaSample om = omega_sample(specs, cfg.N, cfg.cache_dir);
    const stats::StandardizedSample sample = stats::standardize(om.raw, cfg.N);

    Table t;
    t.name = "moments";
    for (std::size_t i = 1; i <= k; ++i) t.columns.push_back("ell_" + std::to_string(i));
    t.columns.insert(t.columns.end(), {"total", "empirical", "gaussian"});

    std::vector<unsigned> ell(k, 0);
    enumerate_indices(ell, 0, cap, [&] {
        stats::MomentIndex idx;
        idx.ell = ell;
        std::vector<Cell> row;
        unsigned total = 0;
        for (unsigned v : ell) {
            row.push_back(Cell::of_int(v));
            total += v;
        }
        row.push_back(Cell::of_int(total));
        row.push_back(Cell::of(stats::mixed_moment_empirical(sample, idx)));
        row.push_back(Cell::of_text(rat_str(stats::gaussian_mixed_moment(idx))));
        t.rows.push_back(std::move(row));
    });
    res.tables.push_back(std::move(t));
    push_diag(res, "moment_cap", std::to_string(cap));
    push_diag(res, "sieve_hi", std::to_string(om.sieve_hi));
}

void run_quantitative(const ExperimentConfig& cfg, ExperimentResult& res) {
    const auto specs = parse_specs(cfg, 1, 1);

    std::vector<std::uint64_t> ladder;
    for (std::uint64_t n = 100; n <= cfg.N; n *= 10) ladder.push_back(n);
    if (ladder.empty() || ladder.back() != cfg.N) ladder.push_back(cfg.N);

    Table lt;
    lt.name = "ladder";
    lt.columns = {"n", "d_k"};
    for (std::uint64_t n : ladder) {
        const OmegaSample om = omega_sample(specs, n, cfg.cache_dir);
        const stats::StandardizedSample sam = stats::standardize(om.raw, n);
        lt.rows.push_back(
            {Cell::of_int(static_cast<long long>(n)), Cell::of(stats::empirical_dK(sam))});
    }
    res.tables.push_back(std::move(lt));

    const kubilius::KubiliusModel model =
        build_model(specs[0].alpha, cfg.N, cfg.seed, cfg.R);
    const std::vector<std::uint64_t> draws = kubilius::sample_model(model, kModelDraws);
    Table ct = char_table(model, draws);
    double sup_diff = 0;
    for (const auto& row : ct.rows) sup_diff = std::max(sup_diff, row.back().real);
    res.tables.push_back(std::move(ct));

    const EsseenRun er = esseen_run(model, draws);
    Table et;
    et.name = "esseen";
    et.columns = {"a", "bound", "model_d_k", "sup_char_diff"};
    et.rows.push_back({Cell::of(er.A), Cell::of(er.bound), Cell::of(er.model_dk),
                       Cell::of(sup_diff)});
    res.tables.push_back(std::move(et));

    push_diag(res, "model_primes", std::to_string(model.primes.size()));
    push_diag(res, "model_s", fmt_real(model.s));
    push_diag(res, "draws", std::to_string(kModelDraws));
    push_diag(res, "esseen_spacing", fmt_real(er.A / 1024.0));
}

void run_kubilius(const ExperimentConfig& cfg, ExperimentResult& res) {
    const auto specs = parse_specs(cfg, 1, 1);
    const kubilius::KubiliusModel model =
        build_model(specs[0].alpha, cfg.N, cfg.seed, cfg.R);
    const std::vector<std::uint64_t> draws = kubilius::sample_model(model, kModelDraws);

    Table mt;
    mt.name = "model";
    mt.columns = {"prime_count", "largest_prime", "s"};
    mt.rows.push_back({Cell::of_int(static_cast<long long>(model.primes.size())),
                       Cell::of_int(static_cast<long long>(model.primes.back())),
                       Cell::of(model.s)});
    res.tables.push_back(std::move(mt));

    res.tables.push_back(char_table(model, draws));

    Table bt;
    bt.name = "binomial";
    bt.columns = {"ell", "model", "sampled"};
    for (unsigned ell = 0; ell <= 6; ++ell)
        bt.rows.push_back({Cell::of_int(ell),
                           Cell::of_text(rat_str(kubilius::binomial_moment_model(model, ell))),
                           Cell::of(kubilius::binomial_moment_sample(draws, ell))});
    res.tables.push_back(std::move(bt));

    const EsseenRun er = esseen_run(model, draws);
    Table et;
    et.name = "esseen";
    et.columns = {"a", "bound", "model_d_k"};
    et.rows.push_back({Cell::of(er.A), Cell::of(er.bound), Cell::of(er.model_dk)});
    res.tables.push_back(std::move(et));

    // standardized-char tail margin on |t| <= sqrt(s)/2: sup of |char| - e^(-4t^2)
    double margin = -1e300;
    const double half = std::sqrt(model.s) / 2.0;
    for (int j = 0; j <= 1000; ++j) {
        const double t = -half + 2.0 * half * j / 1000.0;
        margin = std::max(margin, std::abs(kubilius::char_standardized(model, t)) -
                                      std::exp(-4.0 * t * t));
    }
    Table tt;
    tt.name = "tail";
    tt.columns = {"half_width", "sup_margin"};
    tt.rows.push_back({Cell::of(half), Cell::of(margin)});
    res.tables.push_back(std::move(tt));

    push_diag(res, "draws", std::to_string(kModelDraws));
    push_diag(res, "model_s", fmt_real(model.s));
}

void run_adversary(const ExperimentConfig& cfg, ExperimentResult& res) {
    const unsigned levels = static_cast<unsigned>(cfg.L.value_or(2));
    if (levels < 1 || levels > 8)
        throw validation_error("adversary levels must lie in [1, 8]");
    const adversary::AdversarySchedule sched =
        adversary::construct_sequence(cfg.degree, levels, {});

    Table st;
    st.name = "schedule";
    st.columns = {"level", "a", "b", "n_cap", "alpha"};
    for (std::size_t i = 0; i < sched.levels.size(); ++i) {
        const adversary::AdversaryLevel& lvl = sched.levels[i];
        st.rows.push_back({Cell::of_int(static_cast<long long>(i + 1)),
                           Cell::of_text(int_text(lvl.a)), Cell::of_text(int_text(lvl.b)),
                           Cell::of_int(static_cast<long long>(lvl.N)),
                           Cell::of_text(rat_str(lvl.alpha))});
    }
    res.tables.push_back(std::move(st));

    if (sched.levels.size() >= 2) {
        Table ct;
        ct.name = "collapse";
        ct.columns = {"m", "checked", "margin"};
        Table xt;
        xt.name = "tail_mass";
        xt.columns = {"m",
                      "empirical_d_k", "mass_shift", "gaussian_tail", "bound",
                      "subsample_mass", "threshold_count", "subsample_count"};
        for (unsigned m = 1; m < sched.levels.size(); ++m) {
            const adversary::CollapseReport rep = adversary::collapse_check(sched, m);
            ct.rows.push_back({Cell::of_int(m), Cell::of_int(static_cast<long long>(rep.checked)),
                               Cell::of_text(rat_str(rep.margin))});
            const adversary::AdversaryExperiment ex = adversary::adversary_experiment(sched, m);
            xt.rows.push_back({Cell::of_int(m), Cell::of(ex.empirical_dk), Cell::of(ex.mass_shift),
                               Cell::of(ex.gaussian_tail), Cell::of(ex.bound),
                               Cell::of(ex.subsample_mass),
                               Cell::of_int(static_cast<long long>(ex.threshold_count)),
                               Cell::of_int(static_cast<long long>(ex.subsample_count))});
        }
        res.tables.push_back(std::move(ct));
        res.tables.push_back(std::move(xt));
    }
    push_diag(res, "degree", std::to_string(cfg.degree));
    push_diag(res, "alpha_tail_bound", rat_str(sched.tail_upper()));
}

void run_relations(const ExperimentConfig& cfg, ExperimentResult& res) {
    if (cfg.alphas.empty() || cfg.alphas.size() > 4)
        throw validation_error("relations takes between 1 and 4 slopes");
    if (!cfg.betas.empty()) throw validation_error("relations takes no shifts");
    std::vector<reals::CertifiedReal> alphas;
    for (const std::string& s : cfg.alphas) alphas.push_back(reals::CertifiedReal::parse(s));

    const std::uint64_t height = cfg.J.value_or(64);
    if (height < 1) throw validation_error("relation height bound must be positive");
    const Rat tol = cfg.epsilon ? parse_rat_text(*cfg.epsilon, "relations tolerance") : Rat(0);

    const qlinalg::RelationSet rel = qlinalg::find_near_relations(
        alphas, Int(static_cast<unsigned long>(height)), tol, {1});
    const qlinalg::GammaVector gamma = qlinalg::gamma_vector(rel, alphas, Int(64));

    Table rt;
    rt.name = "relations";
    for (std::size_t i = 1; i <= alphas.size(); ++i)
        rt.columns.push_back("c_" + std::to_string(i));
    rt.columns.push_back("m");
    for (const qlinalg::Relation& r : rel.tuples) {
        std::vector<Cell> row;
        for (const Rat& c : r.coeff) row.push_back(Cell::of_text(rat_str(c)));
        row.push_back(Cell::of_text(int_text(r.m)));
        rt.rows.push_back(std::move(row));
    }
    res.tables.push_back(std::move(rt));

    Table gt;
    gt.name = "gamma";
    gt.columns = {"index", "value"};
    for (std::size_t i = 0; i < gamma.gammas.size(); ++i)
        gt.rows.push_back({Cell::of_int(static_cast<long long>(i + 1)),
                           Cell::of_text(rat_str(gamma.gammas[i]))});
    res.tables.push_back(std::move(gt));

    push_diag(res, "height_bound", std::to_string(height));
    push_diag(res, "tolerance", rat_str(tol));
    push_diag(res, "relation_count", std::to_string(rel.tuples.size()));
}

void run_coprimality(const ExperimentConfig& cfg, ExperimentResult& res) {
    if (cfg.alphas.size() != 1) throw validation_error("coprimality takes exactly one slope");
    if (!cfg.betas.empty()) throw validation_error("coprimality takes no shift");
    const reals::CertifiedReal alpha = reals::CertifiedReal::parse(cfg.alphas[0]);
    const stats::CoprimalityResult r = stats::coprimality_rate(alpha, cfg.N);

    Table t;
    t.name = "coprimality";
    t.columns = {"n", "rate", "coprime", "excluded"};
    t.rows.push_back({Cell::of_int(static_cast<long long>(cfg.N)), Cell::of(r.rate),
                      Cell::of_int(static_cast<long long>(r.coprime)),
                      Cell::of_int(static_cast<long long>(r.excluded))});
    res.tables.push_back(std::move(t));
}

// ---- export ----------------------------------------------------------------

std::string cell_csv(const Cell& c) {
    switch (c.kind) {
        case Cell::Kind::real: return fmt_real(c.real);
        case Cell::Kind::integer: return std::to_string(c.integer);
        case Cell::Kind::text: return c.text;
    }
    return {};
}

json cell_json(const Cell& c) {
    switch (c.kind) {
        case Cell::Kind::real: return c.real;
        case Cell::Kind::integer: return c.integer;
        case Cell::Kind::text: return c.text;
    }
    return nullptr;
}

Cell cell_from_json(const json& j) {
    if (j.is_number_float()) return Cell::of(j.get<double>());
    if (j.is_number_integer() || j.is_number_unsigned())
        return Cell::of_int(j.get<long long>());
    if (j.is_string()) return Cell::of_text(j.get<std::string>());
    throw validation_error("import: cell is neither number nor string");
}

void write_file(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot open for writing: " + path.string());
    out << bytes;
    out.flush();
    if (!out) throw error("write failed: " + path.string());
}

} // namespace

ExperimentKind experiment_from_name(std::string_view name) {
    for (const KindName& kn : kKindNames)
        if (kn.name == name) return kn.kind;
    throw validation_error("unknown experiment '" + std::string(name) + "'");
}

std::string_view experiment_name(ExperimentKind kind) {
    for (const KindName& kn : kKindNames)
        if (kn.kind == kind) return kn.name;
    throw validation_error("unknown experiment kind");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    if (config.N < 16) throw validation_error("N must be at least 16");
    if (config.format != "csv" && config.format != "json")
        throw validation_error("format must be csv or json");
    if (config.J && *config.J < 64)
        throw validation_error("J override must satisfy J >= 64 (harmonic height floor)");
    if (config.R && *config.R > config.N)
        throw validation_error("R override must satisfy R <= N");

    ExperimentResult res;
    res.config = config;
    switch (config.experiment) {
        case ExperimentKind::ek_single: run_ek_single(config, res); break;
        case ExperimentKind::ek_joint: run_ek_joint(config, res); break;
        case ExperimentKind::moments: run_moments(config, res); break;
        case ExperimentKind::quantitative: run_quantitative(config, res); break;
        case ExperimentKind::kubilius: run_kubilius(config, res); break;
        case ExperimentKind::adversary: run_adversary(config, res); break;
        case ExperimentKind::relations: run_relations(config, res); break;
        case ExperimentKind::coprimality: run_coprimality(config, res); break;
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::string table_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const std::vector<Cell>& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += cell_csv(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::vector<fs::path> export_results(const ExperimentResult& result) {
    const ExperimentConfig& cfg = result.config;
    if (cfg.out.empty()) throw validation_error("export needs a nonempty output path");
    std::vector<fs::path> written;

    if (cfg.format == "csv") {
        std::string base = cfg.out;
        if (base.size() > 4 && base.ends_with(".csv")) base.resize(base.size() - 4);
        for (const Table& t : result.tables) {
            fs::path path = base + "_" + t.name + ".csv";
            write_file(path, table_csv(t));
            written.push_back(std::move(path));
        }
        return written;
    }
    if (cfg.format != "json") throw validation_error("format must be csv or json");

    json doc;
    json jc;
    jc["experiment"] = std::string(experiment_name(cfg.experiment));
    jc["n"] = cfg.N;
    jc["alphas"] = cfg.alphas;
    jc["betas"] = cfg.betas;
    if (cfg.R) jc["r"] = *cfg.R;
    if (cfg.J) jc["j"] = *cfg.J;
    if (cfg.L) jc["l"] = *cfg.L;
    if (cfg.epsilon) jc["eps"] = *cfg.epsilon;
    jc["degree"] = cfg.degree;
    jc["seed"] = cfg.seed;
    jc["format"] = cfg.format;
    jc["cache"] = cfg.cache_dir;
    doc["config"] = std::move(jc);

    json jt = json::array();
    for (const Table& t : result.tables) {
        json one;
        one["name"] = t.name;
        one["columns"] = t.columns;
        json rows = json::array();
        for (const std::vector<Cell>& row : t.rows) {
            json r = json::array();
            for (const Cell& c : row) r.push_back(cell_json(c));
            rows.push_back(std::move(r));
        }
        one["rows"] = std::move(rows);
        jt.push_back(std::move(one));
    }
    doc["tables"] = std::move(jt);

    json jd = json::array();
    for (const auto& [k, v] : result.diagnostics) jd.push_back(json::array({k, v}));
    doc["diagnostics"] = std::move(jd);

    std::string base = cfg.out;
    if (!(base.size() > 5 && base.ends_with(".json"))) base += ".json";
    fs::path path = base;
    write_file(path, doc.dump(2) + "\n");
    written.push_back(std::move(path));
    return written;
}

ExperimentResult import_results(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw validation_error("cannot open: " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw validation_error("not a result document (" + file.string() + "): " + e.what());
    }
    try {
        ExperimentResult res;
        const json& jc = doc.at("config");
        res.config.experiment = experiment_from_name(jc.at("experiment").get<std::string>());
        res.config.N = jc.at("n").get<std::uint64_t>();
        res.config.alphas = jc.at("alphas").get<std::vector<std::string>>();
        res.config.betas = jc.at("betas").get<std::vector<std::string>>();
        if (jc.contains("r")) res.config.R = jc.at("r").get<std::uint64_t>();
        if (jc.contains("j")) res.config.J = jc.at("j").get<std::uint64_t>();
        if (jc.contains("l")) res.config.L = jc.at("l").get<std::uint64_t>();
        if (jc.contains("eps")) res.config.epsilon = jc.at("eps").get<std::string>();
        res.config.degree = jc.at("degree").get<unsigned>();
        res.config.seed = jc.at("seed").get<std::uint64_t>();
        res.config.format = jc.at("format").get<std::string>();
        res.config.cache_dir = jc.at("cache").get<std::string>();
        for (const json& one : doc.at("tables")) {
            Table t;
            t.name = one.at("name").get<std::string>();
            t.columns = one.at("columns").get<std::vector<std::string>>();
            for (const json& row : one.at("rows")) {
                std::vector<Cell> r;
                for (const json& c : row) r.push_back(cell_from_json(c));
                t.rows.push_back(std::move(r));
            }
            res.tables.push_back(std::move(t));
        }
        for (const json& pair : doc.at("diagnostics"))
            res.diagnostics.emplace_back(pair.at(0).get<std::string>(),
                                         pair.at(1).get<std::string>());
        return res;
    } catch (const json::exception& e) {
        throw validation_error("malformed result document (" + file.string() + "): " + e.what());
    }
}

} // namespace eklab::experiments
