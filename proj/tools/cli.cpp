#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "droso/error.hpp"
#include "droso/eval.hpp"
#include "droso/image_io.hpp"
#include "droso/parallel.hpp"
#include "droso/persist.hpp"
#include "droso/rng.hpp"
#include "droso/synth.hpp"
#include "droso/voting.hpp"

namespace fs = std::filesystem;

namespace droso::cli {
namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using clock = std::chrono::steady_clock;

double seconds_since(clock::time_point start) {
    return std::chrono::duration<double>(clock::now() - start).count();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

void require_dir(const std::string& dir, const char* flag) {
    require(!dir.empty(), std::string(flag) + " is required");
    if (!fs::is_directory(dir)) throw IoError(std::string(flag) + ": not a directory: " + dir);
}

void require_file(const std::string& file, const char* flag) {
    require(!file.empty(), std::string(flag) + " is required");
    if (!fs::is_regular_file(file)) throw IoError(std::string(flag) + ": no such file: " + file);
}

// The file itself need not exist, its directory must.
void require_writable(const std::string& file, const char* flag) {
    require(!file.empty(), std::string(flag) + " is required");
    const fs::path parent = fs::path(file).parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
        throw IoError(std::string(flag) + ": output directory does not exist: " + parent.string());
}

std::vector<ImageVector> load_images(const std::string& dir) {
    std::vector<ImageVector> images;
    for (const RawFrame& frame : load_frames(dir)) images.push_back(preprocess(frame));
    return images;
}

void write_text(const std::string& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream file(tmp, std::ios::trunc);
        if (!file) throw IoError("cannot write " + tmp.string());
        file << text;
        if (!file) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string join(const std::vector<std::size_t>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
    return s;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// query,reference CSV; every query index 0..n-1 must appear exactly once.
GroundTruth read_ground_truth(const std::string& path, std::size_t queries, std::size_t places,
                              std::size_t tolerance) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ground truth " + path);
    GroundTruth gt;
    gt.tolerance = tolerance;
    std::vector<std::optional<std::size_t>> mapping(queries);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("query", 0) == 0) continue;
        std::size_t q = 0, ref = 0;
        char comma = 0;
        std::istringstream row(line);
        if (!(row >> q >> comma >> ref) || comma != ',')
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 'query,reference'");
        if (q >= queries || ref >= places)
            throw DataError(path + ":" + std::to_string(line_no) + ": index out of range");
        if (mapping[q]) throw DataError(path + ":" + std::to_string(line_no) + ": duplicate query");
        mapping[q] = ref;
    }
    for (std::size_t q = 0; q < queries; ++q) {
        if (!mapping[q]) throw DataError(path + ": no reference for query " + std::to_string(q));
        gt.mapping.push_back(*mapping[q]);
    }
    return gt;
}

}  // namespace

std::string describe(const RunConfig& c) {
    std::ostringstream s;
    s << "droso " << c.command;
    auto flag = [&](const char* name, const auto& value) { s << ' ' << name << ' ' << value; };
    auto path = [&](const char* name, const std::string& value) {
        if (!value.empty()) flag(name, value);
    };
    if (c.command == "synth") {
        path("--ref-dir", c.ref_dir);
        path("--query-dir", c.query_dir);
        flag("--places", c.places);
        flag("--noise", c.noise_sigma);
        flag("--brightness", c.brightness);
        flag("--shift", c.shift_px);
        flag("--seed", c.master_seed);
        return s.str();
    }
    path("--ref-dir", c.ref_dir);
    path("--query-dir", c.query_dir);
    path("--model", c.model_path);
    if (c.command == "train" || c.command == "sweep") {
        if (c.command == "train") {
            flag("--models", c.n_models);
            flag("--activations", c.activations);
        } else {
            flag("--grid-models", join(c.grid_models));
            flag("--grid-activations", join(c.grid_activations));
        }
        flag("--radius-frac", c.radius_frac);
        flag("--epochs", c.epochs);
        flag("--lr", c.lr);
        flag("--seed", c.master_seed);
    }
    if (c.command == "evaluate" || c.command == "sweep") flag("--tolerance", c.tolerance);
    if (c.command == "evaluate") {
        path("--gt", c.gt_path);
        flag("--pr-out", c.pr_out);
        flag("--log-out", c.log_out);
    }
    if (c.command == "sweep") flag("--out", c.sweep_out);
    if (c.command == "benchmark") flag("--iterations", c.iterations);
    return s.str();
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    require(!cfg.ref_dir.empty(), "--ref-dir is required");
    SynthConfig sc;
    sc.seed = cfg.master_seed;
    sc.places = cfg.places;
    sc.noise_sigma = cfg.noise_sigma;
    sc.brightness_shift = cfg.brightness;
    sc.shift_px = cfg.shift_px;
    sc.validate();

    const std::vector<RawFrame> reference = generate_reference(sc);
    auto write_all = [](const std::vector<RawFrame>& frames, const std::string& dir) {
        fs::create_directories(dir);
        char name[32];
        for (std::size_t i = 0; i < frames.size(); ++i) {
            std::snprintf(name, sizeof name, "%06zu.pgm", i);
            write_pnm(frames[i], fs::path(dir) / name);
        }
    };
    write_all(reference, cfg.ref_dir);
    out << "# " << describe(cfg) << '\n' << "wrote " << reference.size() << " reference frames to " << cfg.ref_dir << '\n';
    if (!cfg.query_dir.empty()) {
        write_all(generate_query(reference, sc), cfg.query_dir);
        out << "wrote " << reference.size() << " query frames to " << cfg.query_dir << '\n';
    }
    return kOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
    require_dir(cfg.ref_dir, "--ref-dir");
    require_writable(cfg.model_path, "--model");
    require(cfg.n_models >= 1, "--models must be >= 1");
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.learning_rate = cfg.lr;
    tc.seed = cfg.master_seed;
    tc.validate();

    const auto start = clock::now();
    const std::vector<ImageVector> images = load_images(cfg.ref_dir);
    if (images.size() < 2)
        throw DataError("need >= 2 places, found " + std::to_string(images.size()) + " frame(s) in " + cfg.ref_dir);

    out << "# " << describe(cfg) << '\n';
    const std::size_t radius = radius_from_fraction(cfg.radius_frac, images.size());
    Ensemble ensemble =
        train_ensemble(images, cfg.n_models, cfg.activations, tc, cfg.master_seed, radius, /*quantize_members=*/true);

    std::vector<double> accuracy(ensemble.models.size());
    parallel_for(ensemble.models.size(),
                 [&](std::size_t i) { accuracy[i] = train_accuracy(ensemble.models[i], images); });
    for (std::size_t i = 0; i < accuracy.size(); ++i)
        out << "model " << i << " seed " << ensemble.models[i].seed() << " train_accuracy " << fixed(accuracy[i], 4)
            << '\n';

    const std::size_t bytes = save(ensemble, cfg.model_path);
    out << "places " << images.size() << " radius " << radius << '\n';
    out << "saved " << cfg.model_path << " (" << bytes << " bytes)\n";
    out << "wall_time_s " << fixed(seconds_since(start), 3) << '\n';
    return kOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    require_file(cfg.model_path, "--model");
    require_dir(cfg.query_dir, "--query-dir");
    require_writable(cfg.pr_out, "--pr-out");
    require_writable(cfg.log_out, "--log-out");
    if (!cfg.gt_path.empty()) require_file(cfg.gt_path, "--gt");

    const Ensemble ensemble = load(cfg.model_path);
    const std::vector<ImageVector> queries = load_images(cfg.query_dir);
    if (queries.empty()) throw DataError("no decodable frames in " + cfg.query_dir);

    GroundTruth gt;
    gt.tolerance = cfg.tolerance;
    if (!cfg.gt_path.empty()) {
        gt = read_ground_truth(cfg.gt_path, queries.size(), ensemble.places(), cfg.tolerance);
    } else if (queries.size() != ensemble.places()) {
        throw DataError("query count " + std::to_string(queries.size()) + " differs from model place count " +
                        std::to_string(ensemble.places()) + "; supply --gt");
    }

    const Evaluation result = evaluate(ensemble, queries, gt);

    const std::string header = "# " + describe(cfg) + "\n";
    std::ostringstream pr, log;
    pr << header;
    write_pr_csv(pr, result.curve);
    log << header;
    write_match_log(log, result.matches);
    write_text(cfg.pr_out, pr.str());
    write_text(cfg.log_out, log.str());

    out << "# " << describe(cfg) << '\n';
    out << "queries " << queries.size() << " correct_rate " << fixed(result.correct_rate(), 4) << '\n';
    out << "AUC " << fixed(result.curve.auc, 4) << '\n';
    return kOk;
}

int cmd_benchmark(const RunConfig& cfg, std::ostream& out) {
    require_file(cfg.model_path, "--model");
    const std::string& dir = cfg.query_dir.empty() ? cfg.ref_dir : cfg.query_dir;
    require(!dir.empty(), "--query-dir or --ref-dir is required");
    require_dir(dir, cfg.query_dir.empty() ? "--ref-dir" : "--query-dir");
    require(cfg.iterations >= 10, "--iterations must be >= 10");

    const Ensemble ensemble = load(cfg.model_path);
    const std::vector<fs::path> files = list_frames(dir);
    if (files.empty()) throw DataError("no frames in " + dir);
    const ImageVector image = preprocess(read_frame(files.front()));

    const LatencyStats stats = benchmark(ensemble, image, cfg.iterations);
    const auto bytes = fs::file_size(cfg.model_path);
    out << "# " << describe(cfg) << '\n';
    out << "models " << ensemble.models.size() << " places " << ensemble.places() << '\n';
    out << "mean_ms " << fixed(stats.mean_ms, 4) << " p95_ms " << fixed(stats.p95_ms, 4) << " fps "
        << fixed(stats.fps, 1) << '\n';
    out << "model_bytes " << bytes << " model_mb " << fixed(static_cast<double>(bytes) / 1e6, 2) << '\n';
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    require_dir(cfg.ref_dir, "--ref-dir");
    require_dir(cfg.query_dir, "--query-dir");
    require(!cfg.grid_models.empty() && !cfg.grid_activations.empty(), "sweep grid must be nonempty");
    if (cfg.sweep_out != "-") require_writable(cfg.sweep_out, "--out");
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.learning_rate = cfg.lr;
    tc.seed = cfg.master_seed;
    tc.validate();

    const std::vector<ImageVector> refs = load_images(cfg.ref_dir);
    const std::vector<ImageVector> queries = load_images(cfg.query_dir);
    if (refs.size() < 2) throw DataError("need >= 2 places in " + cfg.ref_dir);
    if (queries.size() != refs.size()) throw DataError("sweep needs one query per reference frame");
    GroundTruth gt;
    gt.tolerance = cfg.tolerance;
    const std::size_t radius = radius_from_fraction(cfg.radius_frac, refs.size());

    std::ostringstream csv;
    csv << "# " << describe(cfg) << '\n' << "n_models,activations,auc,train_s,eval_ms\n";
    std::size_t cell = 0;
    for (std::size_t n : cfg.grid_models) {
        for (std::size_t k : cfg.grid_activations) {
            const std::uint64_t seed = derive_seed(cfg.master_seed, cell++);
            double auc = std::numeric_limits<double>::quiet_NaN();
            double train_s = auc, eval_ms = auc;
            try {
                const auto t0 = clock::now();
                const Ensemble e = train_ensemble(refs, n, k, tc, seed, radius);
                train_s = seconds_since(t0);
                const auto t1 = clock::now();
                auc = evaluate(e, queries, gt).curve.auc;
                eval_ms = 1000.0 * seconds_since(t1);
            } catch (const std::exception& ex) {
                out << "cell n_models=" << n << " activations=" << k << " failed: " << ex.what() << '\n';
            }
            csv << n << ',' << k << ',' << fixed(auc, 6) << ',' << fixed(train_s, 3) << ',' << fixed(eval_ms, 3)
                << '\n';
            out << "n_models " << n << " activations " << k << " auc " << fixed(auc, 4) << '\n';
        }
    }
    if (cfg.sweep_out == "-") out << csv.str();
    else write_text(cfg.sweep_out, csv.str());
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compact visual place recognition: sparse binary encoders with windowed voting"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--ref-dir", cfg.ref_dir, "Reference traversal directory");
        sub->add_option("--query-dir", cfg.query_dir, "Query traversal directory");
        sub->add_option("--seed", cfg.master_seed, "Master seed");
    };
    auto add_training = [&](CLI::App* sub) {
        sub->add_option("--radius-frac", cfg.radius_frac, "Voting radius as a fraction of the place count")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--epochs", cfg.epochs, "Training epochs")->check(CLI::PositiveNumber);
        sub->add_option("--lr", cfg.lr, "SGD learning rate")->check(CLI::PositiveNumber);
    };

    CLI::App* synth = app.add_subcommand("synth", "Write a synthetic reference (and query) traversal as PGM files");
    add_common(synth);
    synth->add_option("--places", cfg.places, "Number of places")->check(CLI::Range(2, 1000000));
    synth->add_option("--noise", cfg.noise_sigma, "Query noise sigma as a fraction of 255")->check(CLI::NonNegativeNumber);
    synth->add_option("--brightness", cfg.brightness, "Query brightness shift as a fraction of 255");
    synth->add_option("--shift", cfg.shift_px, "Query circular horizontal shift in pixels")->check(CLI::Range(-63, 63));

    CLI::App* train_cmd = app.add_subcommand("train", "Train, quantize and save an ensemble");
    add_common(train_cmd);
    add_training(train_cmd);
    train_cmd->add_option("--model", cfg.model_path, "Output model file")->required();
    train_cmd->add_option("--models", cfg.n_models, "Ensemble size")->check(CLI::PositiveNumber);
    train_cmd->add_option("--activations", cfg.activations, "Activations per model")->check(CLI::PositiveNumber);

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "Vote every query, write PR curve and match log");
    add_common(eval_cmd);
    eval_cmd->add_option("--model", cfg.model_path, "Model file")->required();
    eval_cmd->add_option("--tolerance", cfg.tolerance, "Frame tolerance for a correct match");
    eval_cmd->add_option("--gt", cfg.gt_path, "Ground truth CSV (query,reference)");
    eval_cmd->add_option("--pr-out", cfg.pr_out, "PR curve CSV output");
    eval_cmd->add_option("--log-out", cfg.log_out, "Match log CSV output");

    CLI::App* bench_cmd = app.add_subcommand("benchmark", "Time single-threaded voting on one frame");
    add_common(bench_cmd);
    bench_cmd->add_option("--model", cfg.model_path, "Model file")->required();
    bench_cmd->add_option("--iterations", cfg.iterations, "Timed iterations")->check(CLI::Range(10, 100000000));

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "AUC over a grid of ensemble sizes and activation counts");
    add_common(sweep_cmd);
    add_training(sweep_cmd);
    sweep_cmd->add_option("--tolerance", cfg.tolerance, "Frame tolerance for a correct match");
    sweep_cmd->add_option("--grid-models", cfg.grid_models, "Ensemble sizes")->delimiter(',');
    sweep_cmd->add_option("--grid-activations", cfg.grid_activations, "Activation counts")->delimiter(',');
    sweep_cmd->add_option("--out", cfg.sweep_out, "Sweep CSV output ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (synth->parsed()) return cfg.command = "synth", cmd_synth(cfg, out);
        if (train_cmd->parsed()) return cfg.command = "train", cmd_train(cfg, out);
        if (eval_cmd->parsed()) return cfg.command = "evaluate", cmd_evaluate(cfg, out);
        if (bench_cmd->parsed()) return cfg.command = "benchmark", cmd_benchmark(cfg, out);
        if (sweep_cmd->parsed()) return cfg.command = "sweep", cmd_sweep(cfg, out);
        return kUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParameterError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace droso::cli
