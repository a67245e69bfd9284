// Command-line front end: sieved omega tables, delta-normal sequences,
// spacing statistics, window-count moments, characteristic-function checks,
// multiplicative-model averages, and Monte Carlo baselines.  All numeric
// output goes through a fixed 12-significant-digit formatter so reruns are
// byte-identical for any thread count.

#include <omega/omega.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace omega;

namespace {

struct RangeArg {
    uint64_t lo = 0;
    uint64_t hi = 0;  // inclusive on the command line; half-open internally
};

RangeArg parse_range(const std::string& text) {
    const auto pos = text.find("..");
    if (pos == std::string::npos || pos == 0 || pos + 2 >= text.size())
        throw std::invalid_argument("--range expects the form <lo>..<hi>");
    RangeArg r;
    std::size_t used = 0;
    r.lo = std::stoull(text.substr(0, pos), &used);
    if (used != pos) throw std::invalid_argument("--range: bad lower bound");
    const std::string hi_text = text.substr(pos + 2);
    r.hi = std::stoull(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument("--range: bad upper bound");
    if (r.lo > r.hi) throw std::invalid_argument("--range: need lo <= hi");
    return r;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        write_text_file(out_path, text);
}

std::optional<WindowBounds> window_from(double y, double z) {
    if (y == 0.0 && z == 0.0) return std::nullopt;
    return WindowBounds{y, z};
}

uint64_t table_cover(double bound) {
    return static_cast<uint64_t>(std::ceil(bound)) + 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"integers with typically many prime factors: sieves, spacings, moments"};
    app.require_subcommand(1);

    // shared options, registered per subcommand that uses them
    std::string range_text, out_path, cache_dir;
    uint64_t x = 0, m_order = 1, up_to = 0;
    double delta = 0.25, y = 0.0, z = 0.0, c_band = 1.0;
    std::vector<double> lambdas, T_values;
    std::vector<uint64_t> shifts{0};
    std::vector<uint64_t> tuple_a;
    unsigned threads = 0;
    uint64_t segment_size = SieveOptions{}.segment_size;
    int paper_r = 0;
    int baseline_n = 1000, baseline_trials = 500;
    uint64_t seed = 1;
    bool list_values = false;

    const char* env_cache = std::getenv("OMEGA_CACHE_DIR");
    if (env_cache != nullptr) cache_dir = env_cache;

    auto add_perf = [&](CLI::App* sc) {
        sc->add_option("--threads", threads, "worker threads (0 = hardware)");
        sc->add_option("--segment-size", segment_size, "sieve segment length");
    };

    auto* sc_sieve = app.add_subcommand("sieve", "omega counters over a range (CSV)");
    sc_sieve->add_option("--range", range_text, "integer range <lo>..<hi>, inclusive")
        ->required();
    sc_sieve->add_option("--y", y, "window lower cutoff (exclusive)");
    sc_sieve->add_option("--z", z, "window upper cutoff (exclusive)");
    sc_sieve->add_option("--out", out_path, "write output here instead of stdout");
    sc_sieve->add_option("--cache-dir", cache_dir,
                         "checkpoint directory (default $OMEGA_CACHE_DIR)");
    add_perf(sc_sieve);

    auto* sc_ek = app.add_subcommand("ek", "normalized omega band fraction vs Gaussian");
    sc_ek->add_option("--x", x, "sample upper bound")->required();
    sc_ek->add_option("--c", c_band, "band half-width");
    sc_ek->add_option("--out", out_path, "write output here instead of stdout");
    add_perf(sc_ek);

    auto* sc_normal = app.add_subcommand("normal", "delta-normal sequence summary");
    sc_normal->add_option("--x", x, "scale parameter")->required();
    sc_normal->add_option("--delta", delta, "normality exponent in (0, 1/2)");
    sc_normal->add_option("--up-to", up_to, "enumerate past the default bound x*s");
    sc_normal->add_flag("--list", list_values, "emit CSV listing instead of summary");
    sc_normal->add_option("--out", out_path, "write output here instead of stdout");
    add_perf(sc_normal);

    auto* sc_spacings = app.add_subcommand("spacings", "rescaled gap survival (CSV)");
    sc_spacings->add_option("--x", x, "scale parameter")->required();
    sc_spacings->add_option("--delta", delta, "normality exponent in (0, 1/2)");
    sc_spacings->add_option("--lambda", lambdas, "survival thresholds")
        ->required()
        ->delimiter(',');
    sc_spacings->add_option("--out", out_path, "write output here instead of stdout");
    add_perf(sc_spacings);

    auto* sc_moments = app.add_subcommand("moments", "window-count moment vs Poisson");
    sc_moments->add_option("--x", x, "scale parameter")->required();
    sc_moments->add_option("--delta", delta, "normality exponent in (0, 1/2)");
    sc_moments->add_option("--m", m_order, "moment order");
    sc_moments->add_option("--lambda", lambdas, "window lengths in rescaled units")
        ->required()
        ->delimiter(',');
    sc_moments->add_option("--out", out_path, "write output here instead of stdout");
    add_perf(sc_moments);

    auto* sc_charfun = app.add_subcommand("charfun", "joint characteristic function");
    sc_charfun->add_option("--x", x, "average over n <= x")->required();
    sc_charfun->add_option("--y", y, "window lower cutoff (exclusive)");
    sc_charfun->add_option("--z", z, "window upper cutoff (exclusive)");
    sc_charfun->add_option("--paper-cutoffs", paper_r,
                           "derive y,z from x with exponent r (errors when y >= z)");
    sc_charfun->add_option("--T", T_values, "frequencies, one per shift")
        ->required()
        ->delimiter(',');
    sc_charfun->add_option("--b", shifts, "shifts, ascending")->delimiter(',');
    sc_charfun->add_option("--out", out_path, "write output here instead of stdout");
    add_perf(sc_charfun);

    auto* sc_fcheck = app.add_subcommand("fcheck", "empirical f-average vs main term");
    sc_fcheck->add_option("--x", x, "average over n <= x")->required();
    sc_fcheck->add_option("--a", tuple_a, "tuple entries")->required()->delimiter(',');
    sc_fcheck->add_option("--b", shifts, "shifts, ascending")->delimiter(',');
    sc_fcheck->add_option("--out", out_path, "write output here instead of stdout");

    auto* sc_baseline = app.add_subcommand("baseline", "uniform order-statistics survival");
    sc_baseline->add_option("--n", baseline_n, "points per trial");
    sc_baseline->add_option("--lambda", lambdas, "survival threshold")
        ->required()
        ->delimiter(',');
    sc_baseline->add_option("--trials", baseline_trials, "Monte Carlo trials");
    sc_baseline->add_option("--seed", seed, "RNG seed");
    sc_baseline->add_option("--out", out_path, "write output here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    SieveOptions opt;
    opt.threads = threads;
    opt.segment_size = segment_size;

    try {
        if (sc_sieve->parsed()) {
            const RangeArg r = parse_range(range_text);
            const auto window = window_from(y, z);
            OmegaTable t;
            if (!cache_dir.empty()) {
                sieve_with_checkpoints(r.lo, r.hi + 1, window, opt, cache_dir);
                t = assemble_cached_table(cache_dir);
            } else {
                t = omega_table(r.lo, r.hi + 1, window, opt);
            }
            std::ostringstream csv;
            write_omega_csv(t, csv);
            emit(csv.str(), out_path);
        } else if (sc_ek->parsed()) {
            auto t = omega_table(1, x + 1, opt);
            auto band = ek_empirical(x, c_band, t);
            JsonObject j;
            j.field("x", x)
                .field("c", c_band)
                .field("count", band.count)
                .field("empirical", band.empirical)
                .field("gaussian", band.gaussian)
                .field("abs_gap", band.abs_gap());
            emit(j.str(), out_path);
        } else if (sc_normal->parsed()) {
            auto ctx = NormalityContext::for_scale(static_cast<double>(x), delta);
            const uint64_t cover =
                up_to ? up_to : static_cast<uint64_t>(std::floor(ctx.enumeration_bound));
            auto t = omega_table(1, cover + 1, opt);
            auto seq = enumerate_normal(ctx, t, cover);
            if (list_values) {
                CsvWriter csv("index,n");
                for (std::size_t i = 0; i < seq.values.size(); ++i) {
                    const std::vector<std::string> cells{std::to_string(i),
                                                         std::to_string(seq.values[i])};
                    csv.row(cells);
                }
                emit(csv.str(), out_path);
            } else {
                JsonObject j;
                j.field("x", static_cast<double>(x))
                    .field("delta", delta)
                    .field("center", ctx.center)
                    .field("threshold", ctx.threshold)
                    .field("rescale", ctx.rescale)
                    .field("enumeration_bound", ctx.enumeration_bound)
                    .field("covered_to", seq.covered_to)
                    .field("count", uint64_t(seq.values.size()));
                emit(j.str(), out_path);
            }
        } else if (sc_spacings->parsed()) {
            auto ctx = NormalityContext::for_scale(static_cast<double>(x), delta);
            const uint64_t cover = static_cast<uint64_t>(std::floor(ctx.enumeration_bound));
            auto t = omega_table(1, cover + 1, opt);
            auto seq = enumerate_normal(ctx, t, cover);
            auto stats = make_spacing_stats(seq, lambdas);
            CsvWriter csv("lambda,survival,expected,abs_err");
            for (const auto& p : stats.survival) {
                const std::vector<std::string> cells{
                    format_sig12(p.lambda), format_sig12(p.survival),
                    format_sig12(p.expected), format_sig12(p.abs_err())};
                csv.row(cells);
            }
            emit(csv.str(), out_path);
        } else if (sc_moments->parsed()) {
            auto ctx = NormalityContext::for_scale(static_cast<double>(x), delta);
            double max_lambda = 0.0;
            for (double l : lambdas) max_lambda = std::max(max_lambda, l);
            const uint64_t cover =
                table_cover(ctx.enumeration_bound + max_lambda * ctx.rescale);
            auto t = omega_table(1, cover + 1, opt);
            auto seq = enumerate_normal(ctx, t, cover);
            std::string out;
            for (double l : lambdas) {
                auto wm = window_count_moment(seq, static_cast<int>(m_order), l);
                auto pm = poisson_moment(static_cast<int>(m_order), l);
                JsonObject j;
                j.field("x", static_cast<double>(x))
                    .field("delta", delta)
                    .field("m", static_cast<int>(m_order))
                    .field("lambda", l)
                    .field("window_length", wm.window_length)
                    .field("windows", wm.windows)
                    .field("empirical_moment", wm.value())
                    .field("poisson_moment", pm.via_surjections);
                out += j.str();
            }
            emit(out, out_path);
        } else if (sc_charfun->parsed()) {
            double wy = y, wz = z;
            if (paper_r > 0) {
                auto cuts = paper_cutoffs(static_cast<double>(x), paper_r);
                wy = cuts.y;
                wz = cuts.z;
            }
            auto w = prime_window(wy, wz, opt);
            const uint64_t b_max = shifts.empty() ? 0 : shifts.back();
            auto t = omega_table(1, x + b_max + 2, WindowBounds{wy, wz}, opt);
            auto e = evaluate_charfun(x, w, T_values, shifts, t, opt);
            JsonObject j;
            j.field("x", x)
                .field("y", wy)
                .field("z", wz)
                .field("S", e.S)
                .field("T", std::span<const double>(e.T.data(), e.T.size()))
                .field("b", std::span<const uint64_t>(e.shifts.data(), e.shifts.size()))
                .field("lhs_re", e.lhs.real())
                .field("lhs_im", e.lhs.imag())
                .field("rhs_re", e.rhs.real())
                .field("rhs_im", e.rhs.imag())
                .field("abs_error", e.abs_error)
                .field("soft_limit_exceeded", e.soft_limit_exceeded);
            emit(j.str(), out_path);
        } else if (sc_fcheck->parsed()) {
            auto t = make_factored_tuple(tuple_a);
            auto empirical = empirical_f_average(x, t, shifts);
            JsonObject j;
            j.field("x", x)
                .field("a", std::span<const uint64_t>(tuple_a.data(), tuple_a.size()))
                .field("b", std::span<const uint64_t>(shifts.data(), shifts.size()))
                .field("coprime", t.pairwise_coprime)
                .field("empirical", empirical.to_double());
            if (t.pairwise_coprime) {
                auto main = lemma_one_main_term(t);
                j.field("main_term", main.to_double())
                    .field("abs_err", (empirical - main).abs().to_double())
                    .field("tau_bound", tau_error_bound(t, x));
            }
            emit(j.str(), out_path);
        } else if (sc_baseline->parsed()) {
            if (lambdas.size() != 1)
                throw std::invalid_argument("baseline: exactly one --lambda");
            auto b = uniform_baseline(baseline_n, lambdas[0], baseline_trials, seed);
            JsonObject j;
            j.field("n", baseline_n)
                .field("lambda", lambdas[0])
                .field("trials", baseline_trials)
                .field("seed", seed)
                .field("empirical", b.empirical)
                .field("exact", b.exact)
                .field("gaps_total", b.gaps_total)
                .field("gaps_exceeding", b.gaps_exceeding);
            emit(j.str(), out_path);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
