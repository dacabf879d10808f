#include "catex/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "catex/config.hpp"
#include "catex/coupling.hpp"
#include "catex/dataset.hpp"
#include "catex/errors.hpp"
#include "catex/metrics.hpp"
#include "catex/render.hpp"
#include "catex/surrogate.hpp"
#include "internal/json_convert.hpp"

namespace catex {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Concurrent invocations on the same output directory are rejected through an
// exclusively created lock file, removed when the command finishes.
class DirLock {
  public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".catex.lock") {
        std::FILE* f = std::fopen(path_.string().c_str(), "wx");
        if (!f)
            throw InvalidInput("lock file " + path_.string() +
                               " exists; another run owns this output directory");
        std::fputs("locked\n", f);
        std::fclose(f);
        held_ = true;
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;
    ~DirLock() {
        if (held_) {
            std::error_code ec;
            fs::remove(path_, ec);
        }
    }

  private:
    fs::path path_;
    bool held_ = false;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw InvalidInput("failed writing " + path.string());
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// The error reference all backends are judged against: plain ground-truth
// chemistry with every correction off.
CouplingConfig reference_coupling() {
    CouplingConfig c;
    c.backend = ChemistryBackend::Oracle;
    c.skip_equilibrium = false;
    c.oracle_period = 0;
    c.charge_rescale = false;
    c.record_snapshots = true;
    return c;
}

RolloutResult run_column(const ExperimentConfig& cfg, const CouplingConfig& ccfg,
                         const TrainedModel* model) {
    ColumnState col = initial_column(cfg.transport.n_cells, cfg.initial, cfg.exchange);
    return run_rollout(cfg.transport, ccfg, cfg.exchange, cfg.inflow, std::move(col), model);
}

RolloutResult run_reference(const ExperimentConfig& cfg) {
    return run_column(cfg, reference_coupling(), nullptr);
}

// Stack every recorded snapshot (cells x 6) into one tall matrix for
// bootstrap feature statistics.
Matrix stack_snapshots(const RolloutResult& result) {
    std::size_t rows = 0;
    for (const auto& s : result.snapshots) rows += s.rows;
    if (rows == 0) throw InvalidInput("bootstrap: rollout recorded no snapshots");
    Matrix all(rows, 6);
    std::size_t r = 0;
    for (const auto& s : result.snapshots)
        for (std::size_t i = 0; i < s.rows; ++i, ++r)
            for (std::size_t c = 0; c < 6; ++c) all.at(r, c) = s.at(i, c);
    return all;
}

// Presets whose simulation-derived parameters are still unset get them filled
// from reference-rollout statistics before use.
SamplerSpec resolve_sampler(SamplerSpec spec,
                            const std::function<const FeatureStats&()>& stats) {
    const bool needs_ranges =
        spec.uses_ranges() && spec.feature_lo.empty() && spec.feature_hi.empty();
    const bool needs_cov =
        spec.kind == SamplerKind::Covariance && (spec.mean.empty() || spec.cov.empty());
    if (needs_ranges) spec = ranged_spec_from_stats(spec, stats());
    if (needs_cov) spec = covariance_spec_from_stats(spec, stats());
    spec.validate();
    return spec;
}

const SamplerSpec& find_sampler(const ExperimentConfig& cfg, const std::string& name) {
    auto it = cfg.samplers.find(name);
    if (it == cfg.samplers.end()) {
        std::string known;
        for (const auto& [k, v] : cfg.samplers) known += (known.empty() ? "" : ", ") + k;
        throw InvalidInput("unknown sampler preset '" + name + "' (have: " + known + ")");
    }
    return it->second;
}

const ModelSpec& find_model(const ExperimentConfig& cfg, const std::string& name) {
    auto it = cfg.models.find(name);
    if (it == cfg.models.end()) {
        std::string known;
        for (const auto& [k, v] : cfg.models) known += (known.empty() ? "" : ", ") + k;
        throw InvalidInput("unknown model preset '" + name + "' (have: " + known + ")");
    }
    return it->second;
}

void cmd_generate(const ExperimentConfig& cfg, const std::string& sampler_name,
                  std::optional<std::size_t> n_override,
                  const std::optional<std::uint64_t>& seed_override, std::string out_path) {
    SamplerSpec spec = find_sampler(cfg, sampler_name);
    if (n_override) spec.n = *n_override;
    if (seed_override) spec.seed = *seed_override;

    std::optional<FeatureStats> stats;
    spec = resolve_sampler(spec, [&]() -> const FeatureStats& {
        if (!stats) {
            std::cerr << "note: deriving sampler bounds from an oracle reference rollout\n";
            stats = feature_stats(stack_snapshots(run_reference(cfg)));
        }
        return *stats;
    });
    if (spec.n == 0) std::cerr << "warning: n = 0, writing a header-only dataset\n";

    Dataset ds = generate_dataset(spec, cfg.exchange);
    ds.config_digest = cfg.digest;
    if (out_path.empty())
        out_path = (fs::path(cfg.out_dir) / ("dataset_" + sampler_name + ".csv")).string();
    write_dataset(ds, out_path);
    std::cout << "generate: sampler=" << sampler_name << " rows=" << ds.x.rows
              << " failed=" << ds.n_failed << " digest=" << dataset_digest(ds) << " -> "
              << out_path << "\n";
}

void cmd_train(const ExperimentConfig& cfg, const std::string& model_name,
               const std::string& dataset_path, bool grid,
               const std::optional<std::uint64_t>& seed_override, std::string out_path) {
    ModelSpec spec = find_model(cfg, model_name);
    if (seed_override) spec.seed = *seed_override;

    Dataset ds = read_dataset(dataset_path);
    if (ds.x.rows < 2) throw InvalidInput("train: dataset has fewer than 2 rows");
    auto parts = split(ds, 0.8, cfg.seed);
    const Dataset& train = parts.first;
    const Dataset& test = parts.second;

    json grid_j = json::array();
    if (grid) {
        GridSearchResult gs = grid_search(default_grid(spec), train.x, train.y, 5, cfg.seed);
        for (const auto& e : gs.table)
            grid_j.push_back(json{{"spec", model_spec_to_json(e.spec)}, {"cv_mse", e.cv_mse}});
        const std::uint64_t keep_seed = spec.seed;
        spec = gs.best;
        spec.seed = keep_seed;
        std::cout << "train: grid search over " << gs.table.size()
                  << " candidates, best cv_mse=" << gs.best_mse << "\n";
    }

    const auto t0 = std::chrono::steady_clock::now();
    TrainedModel model = TrainedModel::fit(spec, train.x, train.y);
    const double fit_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    model.set_dataset_id(dataset_digest(ds));

    ErrorReport rep = error_report(test.y, model.predict(test.x));
    if (out_path.empty())
        out_path = (fs::path(cfg.out_dir) / ("model_" + model_name + ".json")).string();
    model.save(out_path);

    json report{{"model", model_name},
                {"spec", model_spec_to_json(spec)},
                {"dataset", dataset_path},
                {"dataset_digest", model.dataset_id()},
                {"train_rows", train.x.rows},
                {"test_rows", test.x.rows},
                {"fit_seconds", fit_s},
                {"mse", rep.mse},
                {"rmse", rep.rmse},
                {"r2", rep.r2},
                {"rmse_per_target", rep.rmse_per_target},
                {"model_file", out_path},
                {"config_digest", cfg.digest}};
    if (grid) report["grid"] = grid_j;
    write_text(fs::path(out_path).string() + ".report.json", report.dump(2) + "\n");
    std::cout << "train: model=" << model_name << " rows=" << train.x.rows
              << " rmse=" << rep.rmse << " r2=" << rep.r2 << " fit_s=" << fit_s << " -> "
              << out_path << "\n";
}

void cmd_rollout(const ExperimentConfig& cfg, const std::string& backend_name,
                 const std::string& model_path) {
    const ChemistryBackend backend = backend_from_string(backend_name);
    TrainedModel model;
    const TrainedModel* model_ptr = nullptr;
    if (backend == ChemistryBackend::Surrogate) {
        if (model_path.empty())
            throw InvalidInput("rollout: the surrogate backend needs --model <file>");
        model = TrainedModel::load(model_path);
        model_ptr = &model;
    }

    RolloutResult ref = run_reference(cfg);
    CouplingConfig ccfg = cfg.coupling;
    ccfg.backend = backend;
    ccfg.record_snapshots = true;
    RolloutResult run = run_column(cfg, ccfg, model_ptr);

    const double err = rollout_error(cation_snapshots(ref), cation_snapshots(run));
    const double err_out = rollout_error(cation_snapshots(ref), cation_snapshots(run), true);

    const fs::path out(cfg.out_dir);
    write_outflow_csv(ref, (out / "rollout_reference_outflow.csv").string());
    const std::string base = "rollout_" + backend_name;
    write_outflow_csv(run, (out / (base + "_outflow.csv")).string());

    json summary{{"backend", backend_name},
                 {"coupling", coupling_config_to_json(ccfg)},
                 {"steps", run.log.size()},
                 {"rollout_error", err},
                 {"outflow_rollout_error", err_out},
                 {"surrogate_calls", run.total_surrogate_calls()},
                 {"oracle_calls", run.total_oracle_calls()},
                 {"skipped_cells", run.total_skipped_cells()},
                 {"max_charge_rel_err", run.max_charge_rel_err()},
                 {"injected_equivalents", run.injected_equivalents},
                 {"discharged_equivalents", run.discharged_equivalents},
                 {"initial_domain_equivalents", run.initial_domain_equivalents},
                 {"final_domain_equivalents", run.final_domain_equivalents},
                 {"config_digest", cfg.digest}};
    if (model_ptr) {
        summary["model_file"] = model_path;
        summary["model_dataset_digest"] = model.dataset_id();
    }
    write_text(out / (base + ".summary.json"), summary.dump(2) + "\n");
    std::cout << "rollout: backend=" << backend_name << " steps=" << run.log.size()
              << " error=" << err << " outflow_error=" << err_out
              << " surrogate_calls=" << run.total_surrogate_calls()
              << " oracle_calls=" << run.total_oracle_calls() << " -> "
              << (out / (base + "_outflow.csv")).string() << "\n";
}

void cmd_ablate(const ExperimentConfig& cfg, const std::string& model_path,
                bool corrections_only, bool sweep_only) {
    if (!sweep_only && model_path.empty())
        throw InvalidInput("ablate: the corrections table needs --model (or pass --sweep-only)");

    RolloutResult ref = run_reference(cfg);
    const fs::path out(cfg.out_dir);

    if (!sweep_only) {
        TrainedModel model = TrainedModel::load(model_path);
        const int period = cfg.coupling.oracle_period >= 1 ? cfg.coupling.oracle_period : 10;
        struct Variant {
            const char* name;
            bool skip;
            int period;
            bool rescale;
        };
        const Variant variants[] = {{"none", false, 0, false},
                                    {"mod1", true, 0, false},
                                    {"mod1+2", true, period, false},
                                    {"mod1+2+3", true, period, true}};
        std::ostringstream csv;
        csv << "variant,skip_equilibrium,oracle_period,charge_rescale,rollout_error,"
               "surrogate_calls,oracle_calls,skipped_cells,config_digest\n";
        std::cout << "ablate: corrections, model=" << model_path << "\n";
        for (const auto& v : variants) {
            CouplingConfig ccfg = cfg.coupling;
            ccfg.backend = ChemistryBackend::Surrogate;
            ccfg.skip_equilibrium = v.skip;
            ccfg.oracle_period = v.period;
            ccfg.charge_rescale = v.rescale;
            ccfg.record_snapshots = true;
            RolloutResult run = run_column(cfg, ccfg, &model);
            const double err = rollout_error(cation_snapshots(ref), cation_snapshots(run));
            csv << v.name << ',' << (v.skip ? 1 : 0) << ',' << v.period << ','
                << (v.rescale ? 1 : 0) << ',' << g17(err) << ','
                << run.total_surrogate_calls() << ',' << run.total_oracle_calls() << ','
                << run.total_skipped_cells() << ',' << cfg.digest << "\n";
            std::cout << "  " << v.name << ": rollout_error=" << err << "\n";
        }
        write_text(out / "ablate_corrections.csv", csv.str());
        std::cout << "ablate: -> " << (out / "ablate_corrections.csv").string() << "\n";
    }

    if (!corrections_only) {
        const ModelSpec base = find_model(cfg, cfg.ablate_model);
        std::optional<FeatureStats> stats;
        const auto lazy_stats = [&]() -> const FeatureStats& {
            if (!stats) stats = feature_stats(stack_snapshots(ref));
            return *stats;
        };
        std::ostringstream csv;
        csv << "strategy,size,rows,one_shot_rmse,rollout_error,config_digest\n";
        std::cout << "ablate: sampler strategy x size sweep\n";
        for (const auto& strat : cfg.ablate_strategies) {
            SamplerSpec preset = find_sampler(cfg, strat);
            for (std::size_t size : cfg.ablate_sizes) {
                SamplerSpec sspec = preset;
                sspec.n = size;
                sspec = resolve_sampler(sspec, lazy_stats);
                Dataset ds = generate_dataset(sspec, cfg.exchange);
                ds.config_digest = cfg.digest;
                auto parts = split(ds, 0.8, cfg.seed);
                TrainedModel model = TrainedModel::fit(base, parts.first.x, parts.first.y);
                const double one_shot = rmse(parts.second.y, model.predict(parts.second.x));
                CouplingConfig ccfg = cfg.coupling;
                ccfg.backend = ChemistryBackend::Surrogate;
                ccfg.record_snapshots = true;
                RolloutResult run = run_column(cfg, ccfg, &model);
                const double err = rollout_error(cation_snapshots(ref), cation_snapshots(run));
                csv << strat << ',' << size << ',' << ds.x.rows << ',' << g17(one_shot)
                    << ',' << g17(err) << ',' << cfg.digest << "\n";
                std::cout << "  " << strat << " n=" << size << ": one_shot_rmse=" << one_shot
                          << " rollout_error=" << err << "\n";
            }
        }
        write_text(out / "ablate_sweep.csv", csv.str());
        std::cout << "ablate: -> " << (out / "ablate_sweep.csv").string() << "\n";
    }
}

void cmd_bench(const ExperimentConfig& cfg, const std::vector<std::string>& model_paths) {
    if (model_paths.empty()) throw InvalidInput("bench: need at least one --model file");
    std::ostringstream csv;
    csv << "model,batch_size,repeats,mean_seconds,seconds_per_instance,config_digest\n";
    std::cout << "bench: repeats=" << cfg.bench_repeats << "\n";
    for (const auto& path : model_paths) {
        TrainedModel model = TrainedModel::load(path);
        std::string name = to_string(model.spec().kind);
        if (!model.spec().residual_connection) name += "_nores";
        for (const auto& row :
             benchmark_predict(model, cfg.bench_batch_sizes, cfg.bench_repeats, cfg.seed)) {
            csv << name << ',' << row.batch_size << ',' << row.repeats << ','
                << g17(row.mean_seconds) << ',' << g17(row.seconds_per_instance) << ','
                << cfg.digest << "\n";
            std::cout << "  " << name << " batch=" << row.batch_size
                      << " mean_s=" << row.mean_seconds
                      << " per_instance_s=" << row.seconds_per_instance << "\n";
        }
    }

    // ground-truth baseline: mean equilibrate() wall time per instance over a
    // fixed pool of feasible random inputs
    SamplerSpec pool;
    pool.n = 512;
    pool.seed = cfg.seed;
    const Matrix inputs = sample(pool, cfg.exchange.cec);
    std::vector<AqueousSolution> aq(inputs.rows);
    std::vector<ExchangerState> ex(inputs.rows);
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        aq[i] = AqueousSolution{inputs.at(i, 0), inputs.at(i, 1), inputs.at(i, 2), 0.0, 0.0};
        ex[i] = ExchangerState{inputs.at(i, 3), inputs.at(i, 4), inputs.at(i, 5)};
    }
    double sink = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < cfg.bench_repeats; ++r)
        for (std::size_t i = 0; i < inputs.rows; ++i)
            sink += equilibrate(aq[i], ex[i], cfg.exchange).solution.na;
    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!std::isfinite(sink)) std::cerr << "note: unreachable\n";
    const double mean_s = total / cfg.bench_repeats;
    const double per_instance = mean_s / static_cast<double>(inputs.rows);
    csv << "oracle," << inputs.rows << ',' << cfg.bench_repeats << ',' << g17(mean_s)
        << ',' << g17(per_instance) << ',' << cfg.digest << "\n";
    std::cout << "  oracle batch=" << inputs.rows << " mean_s=" << mean_s
              << " per_instance_s=" << per_instance << "\n";

    const fs::path out_file = fs::path(cfg.out_dir) / "bench.csv";
    write_text(out_file, csv.str());
    std::cout << "bench: -> " << out_file.string() << "\n";
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

void cmd_render(const std::string& input, std::string output, const std::string& x_col,
                std::vector<std::string> y_cols, std::string title) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw InvalidInput("render: cannot open " + input);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("render: empty file " + input);
    const std::vector<std::string> header = split_fields(line);
    std::vector<std::vector<double>> cols(header.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size())
            throw InvalidInput("render: ragged row in " + input);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(fields[c].c_str(), &end);
            const bool parsed = end && *end == '\0' && end != fields[c].c_str();
            cols[c].push_back(parsed ? v : std::numeric_limits<double>::quiet_NaN());
        }
    }

    const auto col_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return c;
        throw InvalidInput("render: no column '" + name + "' in " + input);
    };
    const std::size_t xi = x_col.empty() ? 0 : col_index(x_col);
    if (y_cols.empty()) {
        // default to every other column that holds at least one number
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == xi) continue;
            for (double v : cols[c])
                if (std::isfinite(v)) {
                    y_cols.push_back(header[c]);
                    break;
                }
        }
        if (y_cols.empty()) throw InvalidInput("render: no numeric columns to plot");
    }

    std::vector<ChartSeries> series;
    for (const auto& name : y_cols)
        series.push_back(ChartSeries{name, cols[xi], cols[col_index(name)]});
    if (title.empty()) title = fs::path(input).filename().string();
    if (output.empty()) output = fs::path(input).replace_extension(".svg").string();
    write_text(output, render_line_chart(series, title, header[xi], ""));
    std::cout << "render: " << input << " -> " << output << "\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{
        "catex: 1D advective transport coupled to Na/K/Ca cation-exchange chemistry,\n"
        "with ground-truth and trained-surrogate chemistry backends"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::uint64_t seed_value = 0;
    app.add_option("--config", config_path, "experiment config JSON (defaults when omitted)")
        ->check(CLI::ExistingFile);
    auto* seed_opt =
        app.add_option("--seed", seed_value, "override the config seed (and per-run seeds)");
    app.add_option("--out", out_override, "override the output directory");

    auto* gen = app.add_subcommand("generate", "sample + label a training dataset");
    std::string gen_sampler = "vanilla";
    std::size_t gen_n = 0;
    std::string gen_out;
    gen->add_option("--sampler", gen_sampler, "sampler preset name")->capture_default_str();
    auto* gen_n_opt = gen->add_option("--n", gen_n, "override the preset's row count");
    gen->add_option("--output", gen_out, "dataset CSV path (default out_dir/dataset_<sampler>.csv)");
    gen->fallthrough();

    auto* train = app.add_subcommand("train", "fit a model on a dataset, report held-out error");
    std::string train_model = "gbdt";
    std::string train_dataset;
    std::string train_out;
    bool train_grid = false;
    train->add_option("--model", train_model, "model preset name")->capture_default_str();
    train->add_option("--dataset", train_dataset, "dataset CSV from `generate`")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--output", train_out, "model file path (default out_dir/model_<name>.json)");
    train->add_flag("--grid", train_grid, "cross-validated grid search before the final fit");
    train->fallthrough();

    auto* roll = app.add_subcommand("rollout", "run the column and score it against the reference");
    std::string roll_backend = "oracle";
    std::string roll_model;
    roll->add_option("--backend", roll_backend, "oracle | surrogate")->capture_default_str();
    roll->add_option("--model", roll_model, "trained model file (surrogate backend)")
        ->check(CLI::ExistingFile);
    roll->fallthrough();

    auto* abl = app.add_subcommand(
        "ablate", "correction ablation table and sampler-strategy x size sweep");
    std::string abl_model;
    bool abl_corr_only = false;
    bool abl_sweep_only = false;
    abl->add_option("--model", abl_model, "trained model for the corrections table")
        ->check(CLI::ExistingFile);
    abl->add_flag("--corrections-only", abl_corr_only, "skip the strategy x size sweep");
    abl->add_flag("--sweep-only", abl_sweep_only, "skip the corrections table");
    abl->fallthrough();

    auto* bench = app.add_subcommand("bench", "inference timing table with oracle baseline");
    std::vector<std::string> bench_models;
    bench->add_option("--model", bench_models, "trained model file(s)")
        ->required()
        ->check(CLI::ExistingFile);
    bench->fallthrough();

    auto* rend = app.add_subcommand("render", "draw an SVG line chart from a result CSV");
    std::string rend_input, rend_output, rend_x, rend_title;
    std::vector<std::string> rend_y;
    rend->add_option("--input", rend_input, "CSV file")->required()->check(CLI::ExistingFile);
    rend->add_option("--output", rend_output, "SVG path (default: input with .svg)");
    rend->add_option("--x", rend_x, "x column name (default: first column)");
    rend->add_option("--y", rend_y, "y column names (default: all numeric)")->delimiter(',');
    rend->add_option("--title", rend_title, "chart title");
    rend->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (rend->parsed()) {
            cmd_render(rend_input, rend_output, rend_x, rend_y, rend_title);
            return 0;
        }

        ExperimentConfig cfg = ExperimentConfig::load(config_path);
        const bool seeded = seed_opt->count() > 0;
        if (seeded) cfg.seed = seed_value;
        if (!out_override.empty()) cfg.out_dir = out_override;
        cfg.recompute_digest();
        fs::create_directories(cfg.out_dir);
        DirLock lock(cfg.out_dir);

        std::optional<std::uint64_t> seed_override(seed_value);
        if (!seeded) seed_override.reset();
        if (gen->parsed()) {
            cmd_generate(cfg, gen_sampler,
                         gen_n_opt->count() ? std::optional<std::size_t>(gen_n) : std::nullopt,
                         seed_override, gen_out);
        } else if (train->parsed()) {
            cmd_train(cfg, train_model, train_dataset, train_grid, seed_override, train_out);
        } else if (roll->parsed()) {
            cmd_rollout(cfg, roll_backend, roll_model);
        } else if (abl->parsed()) {
            cmd_ablate(cfg, abl_model, abl_corr_only, abl_sweep_only);
        } else if (bench->parsed()) {
            cmd_bench(cfg, bench_models);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}

}  // namespace catex
