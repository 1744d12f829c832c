#pragma once

// The mouldcalc command line, as a function of argv and two streams so the
// test suite can drive it in-process.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mouldcalc.hpp>

namespace mouldcalc::cli
{

enum exit_code : int { ok = 0, identity_failure = 1, validation_failure = 2, io_failure = 3 };

struct RunConfig {
    std::string field_path;
    int x_order = 10;
    int n_max = 3;
    std::optional<int> zeta_order;
    std::vector<Letter> support;
    std::size_t max_length = 4;
    std::vector<std::string> suites{"all"};
    std::vector<std::string> eval_points;
    std::string format = "json";
    std::string out_dir = ".";
    std::string cache_path;
    bool rebuild_cache = false;
    bool no_cache = false;
    bool repair = false;
    unsigned threads = 1;
    std::size_t word_warn = 200000;
};

/// $MOULDCALC_CACHE_DIR, else $XDG_CACHE_HOME/mouldcalc, else ~/.cache/mouldcalc.
inline std::filesystem::path default_cache_dir()
{
    if (const char *d = std::getenv("MOULDCALC_CACHE_DIR"); d && *d) {
        return d;
    }
    if (const char *d = std::getenv("XDG_CACHE_HOME"); d && *d) {
        return std::filesystem::path(d) / "mouldcalc";
    }
    if (const char *h = std::getenv("HOME"); h && *h) {
        return std::filesystem::path(h) / ".cache" / "mouldcalc";
    }
    return ".mouldcalc-cache";
}

inline std::optional<std::filesystem::path> cache_file(const RunConfig &cfg, const SaddleNodeField &field)
{
    if (cfg.no_cache) {
        return std::nullopt;
    }
    if (!cfg.cache_path.empty()) {
        return std::filesystem::path(cfg.cache_path);
    }
    return default_cache_dir() / (field_fingerprint(field) + ".json");
}

class session
{
public:
    session(const RunConfig &cfg, std::ostream &out, std::ostream &err) : cfg_(cfg), out_(out), err_(err) {}

    int normalize()
    {
        load();
        warm_cache();
        for (int n = 0; n <= cfg_.n_max; ++n) {
            const Integer count = count_words(n, cfg_.x_order, field_.support());
            TruncatedSeries phi, psi;
            if (count <= Integer(static_cast<unsigned long>(cfg_.word_warn))) {
                phi = phi_n(*v_, field_, n, cfg_.threads);
                psi = psi_n(*v_, field_, n, cfg_.threads);
            } else {
                err_ << "warning: phi_" << n << " involves " << count.get_str() << " words (above --word-warn "
                     << cfg_.word_warn << "); summing by suffix weight instead\n";
                phi = phi_n(field_, n, cfg_.x_order);
                psi = psi_n(field_, n, cfg_.x_order);
            }
            emit({"phi", n, "x", phi, count.get_str()});
            emit({"psi", n, "x", psi, count.get_str()});
        }
        store_cache();
        return ok;
    }

    int check()
    {
        load();
        warm_cache();
        CheckOptions opts;
        opts.x_order = cfg_.x_order;
        opts.n_max = cfg_.n_max;
        opts.max_length = cfg_.max_length;
        opts.alphabet = cfg_.support;
        opts.threads = cfg_.threads;

        std::vector<std::string> suites;
        for (const auto &s : cfg_.suites) {
            if (s == "all") {
                suites.insert(suites.end(), suite_names().begin(), suite_names().end());
            } else {
                suites.push_back(s);
            }
        }
        bool all_ok = true;
        json report = json::array();
        std::string csv = "suite,status,checked,identity,range,failure\n";
        for (const auto &s : suites) {
            const CheckResult r = run_suite(s, field_, *v_, opts);
            all_ok = all_ok && r.ok;
            out_ << (r.ok ? "PASS " : "FAIL ") << r.suite << ": " << r.identity << " [" << r.range << "], "
                 << r.checked << " checked";
            if (!r.ok) {
                out_ << "; " << r.failure;
            }
            out_ << '\n';
            report.push_back({{"suite", r.suite},
                              {"identity", r.identity},
                              {"range", r.range},
                              {"checked", r.checked},
                              {"status", r.ok ? "pass" : "fail"},
                              {"failure", r.failure}});
            csv += r.suite + ',' + (r.ok ? "pass" : "fail") + ',' + std::to_string(r.checked) + ",\"" + r.identity
                   + "\",\"" + r.range + "\",\"" + r.failure + "\"\n";
        }
        const bool as_csv = cfg_.format == "csv";
        write(as_csv ? "check_report.csv" : "check_report.json", as_csv ? csv : report.dump(2) + '\n');
        store_cache();
        return all_ok ? ok : identity_failure;
    }

    int borel_cmd()
    {
        load();
        const int z = cfg_.zeta_order.value_or(std::max(cfg_.x_order - 1, 0));
        std::vector<std::pair<Scalar, std::string>> points;
        for (const auto &p : cfg_.eval_points) {
            try {
                points.emplace_back(Scalar(parse_rational(p)), p);
            } catch (const std::exception &) {
                throw input_error("--eval expects a rational p/q, got '" + p + "'");
            }
        }
        json evals = json::array();
        std::string csv = "n,zeta,partial_sum,tail_bound\n";
        for (int n = 0; n <= cfg_.n_max; ++n) {
            const BorelPoly f = borel_phi_n(field_, n, z);
            emit({"phi_hat", n, "zeta", f.series(), count_words(n, z + 1, field_.support()).get_str()});
            for (const auto &[zeta, text] : points) {
                const PartialSum s = evaluate_partial_sum(f, zeta);
                std::string bound = "omitted";
                if (s.tail_bound) {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%.6e", *s.tail_bound);
                    bound = buf;
                } else if (n == 0) {
                    err_ << "warning: |zeta| >= 1 at zeta = " << text << "; tail bound omitted\n";
                }
                out_ << "phi_hat_" << n << "(" << text << ") ~ " << s.value.to_string() << " (tail bound " << bound
                     << ")\n";
                evals.push_back({{"n", n},
                                 {"zeta", text},
                                 {"partial_sum", scalar_to_json(s.value)},
                                 {"tail_bound", s.tail_bound ? json(bound) : json(nullptr)}});
                csv += std::to_string(n) + ',' + text + ',' + s.value.to_string() + ',' + bound + '\n';
            }
        }
        if (!points.empty()) {
            const bool as_csv = cfg_.format == "csv";
            write(as_csv ? "phi_hat_eval.csv" : "phi_hat_eval.json", as_csv ? csv : evals.dump(2) + '\n');
        }
        return ok;
    }

    int cache_inspect()
    {
        const auto path = resolve_cache_for_admin();
        if (!std::filesystem::exists(path)) {
            out_ << "no cache at " << path.string() << '\n';
            return ok;
        }
        const MouldCache c = load_cache(path);
        out_ << "cache " << path.string() << ": field " << c.fingerprint << ", x-order " << c.x_order << ", "
             << c.entries.size() << " entries\n";
        return ok;
    }

    int cache_clear()
    {
        if (cfg_.cache_path.empty() && cfg_.field_path.empty()) {
            const auto dir = default_cache_dir();
            std::size_t removed = 0;
            if (std::filesystem::is_directory(dir)) {
                for (const auto &e : std::filesystem::directory_iterator(dir)) {
                    if (e.path().extension() == ".json") {
                        removed += std::filesystem::remove(e.path()) ? 1 : 0;
                    }
                }
            }
            out_ << "removed " << removed << " cache file(s) from " << dir.string() << '\n';
            return ok;
        }
        const auto path = resolve_cache_for_admin();
        const bool removed = std::filesystem::remove(path);
        out_ << (removed ? "removed " : "no cache at ") << path.string() << '\n';
        return ok;
    }

private:
    void load()
    {
        if (cfg_.field_path.empty()) {
            throw input_error("--field is required");
        }
        field_ = load_field(cfg_.field_path, cfg_.repair ? validation_mode::repair : validation_mode::strict);
        v_.emplace(solve_V(field_, cfg_.x_order));
    }

    std::filesystem::path resolve_cache_for_admin()
    {
        if (!cfg_.cache_path.empty()) {
            return cfg_.cache_path;
        }
        if (cfg_.field_path.empty()) {
            throw input_error("cache inspect needs --cache or --field");
        }
        field_ = load_field(cfg_.field_path, cfg_.repair ? validation_mode::repair : validation_mode::strict);
        return *cache_file(cfg_, field_);
    }

    void warm_cache()
    {
        cache_path_ = cache_file(cfg_, field_);
        if (!cache_path_ || cfg_.rebuild_cache || !std::filesystem::exists(*cache_path_)) {
            return;
        }
        MouldCache c;
        try {
            c = load_cache(*cache_path_);
        } catch (const input_error &e) {
            throw input_error(std::string(e.what()) + "; rerun with --rebuild-cache to replace it");
        }
        if (c.fingerprint == field_fingerprint(field_)) {
            preserve_cache_ = c.x_order > cfg_.x_order;
            preload_cache(*v_, field_, c);
        }
    }

    // A cache built at a higher order is kept rather than replaced by a
    // truncated one.
    void store_cache()
    {
        if (!cache_path_ || preserve_cache_ || v_->memo_size() == 0) {
            return;
        }
        save_cache(*cache_path_, snapshot_cache(*v_, field_));
    }

    void emit(const ComponentTable &t)
    {
        const auto fmt = cfg_.format == "csv" ? output_format::csv : output_format::json;
        write(file_name(t, fmt), render(t, fmt));
    }

    void write(const std::string &name, const std::string &text)
    {
        const auto path = std::filesystem::path(cfg_.out_dir) / name;
        write_text_file(path, text);
        out_ << "wrote " << path.string() << '\n';
    }

    const RunConfig &cfg_;
    std::ostream &out_;
    std::ostream &err_;
    SaddleNodeField field_;
    std::optional<Mould> v_;
    std::optional<std::filesystem::path> cache_path_;
    bool preserve_cache_ = false;
};

inline void add_field_options(CLI::App &cmd, RunConfig &cfg)
{
    cmd.add_option("--field", cfg.field_path, "Field file (JSON)")->required();
    cmd.add_option("--x-order", cfg.x_order, "Truncation order in x")->check(CLI::NonNegativeNumber);
    cmd.add_option("--n-max", cfg.n_max, "Largest y-component n")->check(CLI::NonNegativeNumber);
    cmd.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    cmd.add_option("--out", cfg.out_dir, "Output directory");
    cmd.add_flag("--repair", cfg.repair, "Overwrite terms that violate the field conditions instead of failing");
}

inline void add_cache_options(CLI::App &cmd, RunConfig &cfg)
{
    cmd.add_option("--cache", cfg.cache_path, "Mould cache file (default: one file per field in $MOULDCALC_CACHE_DIR)");
    cmd.add_flag("--rebuild-cache", cfg.rebuild_cache, "Ignore and overwrite an existing cache");
    cmd.add_flag("--no-cache", cfg.no_cache, "Neither read nor write a cache");
    cmd.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
}

/// Parses argv and runs one subcommand; returns the process exit code.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    RunConfig cfg;
    CLI::App app{"Formal normalisation of saddle-node vector fields by mould expansion"};
    app.require_subcommand(1);

    auto *normalize = app.add_subcommand("normalize", "Write phi_n and psi_n for n <= n-max");
    add_field_options(*normalize, cfg);
    add_cache_options(*normalize, cfg);
    normalize->add_option("--word-warn", cfg.word_warn,
                          "Above this many words per component, warn and skip the per-word (cached) route");

    auto *check = app.add_subcommand("check", "Run verification suites; exit 1 on any nonzero residual");
    add_field_options(*check, cfg);
    add_cache_options(*check, cfg);
    check->add_option("--suite", cfg.suites, "Suites: all, equation, valuation, symmetral, inverse, oracle, "
                                             "composition, borel, integral")
        ->delimiter(',');
    check->add_option("--support", cfg.support, "Letters spanning the checked words (default: the field's alphabet)")
        ->delimiter(',');
    check->add_option("--max-length", cfg.max_length, "Longest checked word");

    auto *borel_cmd = app.add_subcommand("borel", "Write Borel transforms of phi_n and evaluate partial sums");
    add_field_options(*borel_cmd, cfg);
    borel_cmd->add_option("--zeta-order", cfg.zeta_order, "Truncation order in zeta (default x-order - 1)")
        ->check(CLI::NonNegativeNumber);
    borel_cmd->add_option("--eval", cfg.eval_points, "Rational points p/q for partial sums")->delimiter(',');

    auto *cache = app.add_subcommand("cache", "Inspect or clear mould caches");
    cache->require_subcommand(1);
    auto *inspect = cache->add_subcommand("inspect", "Describe a cache file");
    auto *clear = cache->add_subcommand("clear", "Delete a cache file, or every cache in the default directory");
    for (auto *c : {inspect, clear}) {
        c->add_option("--cache", cfg.cache_path, "Cache file");
        c->add_option("--field", cfg.field_path, "Field whose default cache is meant");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : io_failure;
    }

    for (const auto &s : cfg.suites) {
        if (s != "all" && std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
            err << "error: unknown suite '" << s << "'\n";
            return io_failure;
        }
    }

    session run(cfg, out, err);
    try {
        if (normalize->parsed()) {
            return run.normalize();
        }
        if (check->parsed()) {
            return run.check();
        }
        if (borel_cmd->parsed()) {
            return run.borel_cmd();
        }
        if (inspect->parsed()) {
            return run.cache_inspect();
        }
        return run.cache_clear();
    } catch (const validation_error &e) {
        err << "error: field violates the condition \"" << condition_name(e.condition()) << "\": " << e.what()
            << '\n';
        return validation_failure;
    } catch (const input_error &e) {
        err << "error: " << e.what() << '\n';
        return io_failure;
    } catch (const std::filesystem::filesystem_error &e) {
        err << "error: " << e.what() << '\n';
        return io_failure;
    }
}

} // namespace mouldcalc::cli
