#include "fmd/experiment.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "fmd/embedder.hpp"
#include "fmd/errors.hpp"
#include "fmd/frechet.hpp"
#include "fmd/motion_image.hpp"
#include "fmd/motion_io.hpp"
#include "fmd/version.hpp"
#include "text_util.hpp"

namespace fmd {

using detail::fmt17;

namespace {

// Stream-derivation tags; any fixed distinct constants work.
constexpr std::uint64_t kTagSynth = 0x53594e5448ull;  // "SYNTH"
constexpr std::uint64_t kTagSplit = 0x53504c4954ull;  // "SPLIT"

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        out += fmt17(values[i]);
    }
    return out;
}

std::string join_ints(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(values[i]);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& field, const std::string& value) {
    std::vector<double> out;
    std::string cleaned = value;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    for (const auto& tok : detail::split_ws(cleaned)) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') {
            throw ConfigError(field, "expected a list of reals, got '" + tok + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& field, const std::string& value) {
    std::vector<int> out;
    std::string cleaned = value;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    for (const auto& tok : detail::split_ws(cleaned)) {
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0') {
            throw ConfigError(field, "expected a list of integers, got '" + tok + "'");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

long long parse_scalar_int(const std::string& field, const std::string& value) {
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0') {
        throw ConfigError(field, "expected an integer, got '" + value + "'");
    }
    return v;
}

double parse_scalar_double(const std::string& field, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
        throw ConfigError(field, "expected a real, got '" + value + "'");
    }
    return v;
}

template <typename T>
void require_unique(const std::string& field, const std::vector<T>& values) {
    std::set<T> seen(values.begin(), values.end());
    if (seen.size() != values.size()) throw ConfigError(field, "contains duplicate entries");
}

int kind_rank(NoiseKind kind) { return static_cast<int>(kind); }

}  // namespace

void ExperimentConfig::validate() const {
    if (lengths.empty()) throw ConfigError("lengths", "must list at least one motion length");
    for (int l : lengths) {
        if (l < 2) throw ConfigError("lengths", "motion lengths must be >= 2");
    }
    require_unique("lengths", lengths);
    if (latent_dim < 1) throw ConfigError("latent_dim", "must be >= 1");
    if (repetitions < 1) throw ConfigError("repetitions", "must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction", "must lie strictly between 0 and 1");
    }
    if (dataset_dir.empty()) {
        if (synth_clips < 2) throw ConfigError("synth_clips", "needs >= 2 clips to split");
        if (synth_joints < 2) throw ConfigError("synth_joints", "needs >= 2 joints");
        if (synth_frames < 1) throw ConfigError("synth_frames", "must be >= 1");
        if (!(synth_fps > 0.0)) throw ConfigError("synth_fps", "must be positive");
    }
    for (double z : gaussian_grid) {
        if (!(z >= 0.0)) throw ConfigError("gaussian_grid", "zeta must be >= 0");
    }
    require_unique("gaussian_grid", gaussian_grid);
    for (double z : salt_pepper_grid) {
        if (!(z >= 0.0 && z <= 1.0)) throw ConfigError("salt_pepper_grid", "zeta must lie in [0,1]");
    }
    require_unique("salt_pepper_grid", salt_pepper_grid);
    const int max_length = *std::max_element(lengths.begin(), lengths.end());
    for (int z : temporal_grid) {
        if (z < 0) throw ConfigError("temporal_grid", "zeta must be >= 0");
        if (z > max_length) {
            throw ConfigError("temporal_grid", "zeta " + std::to_string(z) +
                                                   " exceeds the largest motion length " +
                                                   std::to_string(max_length));
        }
    }
    require_unique("temporal_grid", temporal_grid);
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream out;
    out << "dataset_dir = " << dataset_dir << '\n';
    out << "gaussian_grid = " << join_doubles(gaussian_grid) << '\n';
    out << "latent_dim = " << latent_dim << '\n';
    out << "lengths = " << join_ints(lengths) << '\n';
    out << "master_seed = " << master_seed << '\n';
    out << "repetitions = " << repetitions << '\n';
    out << "salt_pepper_grid = " << join_doubles(salt_pepper_grid) << '\n';
    out << "synth_clips = " << synth_clips << '\n';
    out << "synth_fps = " << fmt17(synth_fps) << '\n';
    out << "synth_frames = " << synth_frames << '\n';
    out << "synth_joints = " << synth_joints << '\n';
    out << "temporal_grid = " << join_ints(temporal_grid) << '\n';
    out << "train_fraction = " << fmt17(train_fraction) << '\n';
    return out.str();
}

std::uint32_t ExperimentConfig::hash() const {
    const std::string text = canonical_text();
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size())));
}

void apply_config_override(ExperimentConfig& config, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError(assignment, "expected 'key = value'");
    }
    const std::string key = detail::trim(assignment.substr(0, eq));
    const std::string value = detail::trim(assignment.substr(eq + 1));

    if (key == "master_seed") {
        char* end = nullptr;
        config.master_seed = std::strtoull(value.c_str(), &end, 10);
        if (end == value.c_str() || *end != '\0') throw ConfigError(key, "expected an integer");
    } else if (key == "dataset_dir") {
        config.dataset_dir = value;
    } else if (key == "synth_clips") {
        config.synth_clips = static_cast<int>(parse_scalar_int(key, value));
    } else if (key == "synth_joints") {
        config.synth_joints = static_cast<int>(parse_scalar_int(key, value));
    } else if (key == "synth_frames") {
        config.synth_frames = static_cast<int>(parse_scalar_int(key, value));
    } else if (key == "synth_fps") {
        config.synth_fps = parse_scalar_double(key, value);
    } else if (key == "lengths") {
        config.lengths = parse_int_list(key, value);
    } else if (key == "latent_dim") {
        config.latent_dim = static_cast<int>(parse_scalar_int(key, value));
    } else if (key == "gaussian_grid") {
        config.gaussian_grid = parse_double_list(key, value);
    } else if (key == "salt_pepper_grid") {
        config.salt_pepper_grid = parse_double_list(key, value);
    } else if (key == "temporal_grid") {
        config.temporal_grid = parse_int_list(key, value);
    } else if (key == "repetitions") {
        config.repetitions = static_cast<int>(parse_scalar_int(key, value));
    } else if (key == "train_fraction") {
        config.train_fraction = parse_scalar_double(key, value);
    } else {
        throw ConfigError(key, "unknown key");
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        apply_config_override(config, stripped);
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

std::vector<MotionClip> load_dataset_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw ConfigError("dataset_dir", "'" + dir + "' is not a directory");
    }
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<MotionClip> clips;
    clips.reserve(paths.size());
    for (const auto& p : paths) clips.push_back(load_motion(p));
    if (clips.size() < 2) {
        throw InsufficientData("dataset directory holds " + std::to_string(clips.size()) +
                               " clips, need at least 2");
    }
    return clips;
}

// Per-length shared state: clean test windows plus the fitted embedder and
// the clean reference statistics computed once and reused by every cell.
struct LengthContext {
    int length = 0;
    std::vector<MotionClip> test_windows;
    EmbedderModel model;
    std::vector<GaussianStats> reference;  // single element; late-constructed
};

struct Cell {
    NoiseKind kind;
    int length_index;
    double zeta;
};

struct Task {
    int cell = 0;
    int rep = 0;
    std::uint64_t seed = 0;
};

Eigen::MatrixXd stack_images(const std::vector<MotionClip>& windows) {
    if (windows.empty()) throw InsufficientData("no windows to embed");
    const MotionImage first = to_image(to_directional(windows.front()));
    Eigen::MatrixXd X(static_cast<Eigen::Index>(windows.size()), first.pixels.size());
    X.row(0) = first.pixels.transpose();
    for (std::size_t i = 1; i < windows.size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) =
            to_image(to_directional(windows[i])).pixels.transpose();
    }
    return X;
}

double run_cell_rep(const LengthContext& ctx, const Cell& cell, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(ctx.test_windows.size()),
                      static_cast<Eigen::Index>(ctx.model.dims()));
    for (std::size_t i = 0; i < ctx.test_windows.size(); ++i) {
        MotionClip noisy = [&] {
            switch (cell.kind) {
                case NoiseKind::gaussian:
                    return add_gaussian(ctx.test_windows[i], cell.zeta, rng);
                case NoiseKind::salt_pepper:
                    return add_salt_pepper(ctx.test_windows[i], cell.zeta, rng);
                case NoiseKind::temporal:
                    return add_temporal(ctx.test_windows[i], static_cast<int>(cell.zeta), rng);
            }
            throw ValidationError("unknown noise kind");
        }();
        X.row(static_cast<Eigen::Index>(i)) =
            to_image(to_directional(noisy)).pixels.transpose();
    }
    const Eigen::MatrixXd features = embed_all(ctx.model, X);
    const GaussianStats stats = fit_gaussian(features);
    return frechet_distance(ctx.reference.front(), stats);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, int threads) {
    config.validate();

    std::vector<MotionClip> clips =
        config.dataset_dir.empty()
            ? synth_dataset(derive_seed(config.master_seed, {kTagSynth}), config.synth_clips,
                            config.synth_joints == 17 ? Skeleton::humanoid17()
                                                      : Skeleton::chain(config.synth_joints),
                            config.synth_frames, config.synth_fps)
            : load_dataset_dir(config.dataset_dir);
    if (clips.size() < 2) throw InsufficientData("need at least 2 clips to split");
    for (const auto& clip : clips) {
        if (clip.skeleton.parents != clips.front().skeleton.parents) {
            throw DimensionMismatch("dataset mixes different skeleton topologies");
        }
    }

    // Deterministic 70/30 split by clip.
    std::vector<std::size_t> perm(clips.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng split_rng(derive_seed(config.master_seed, {kTagSplit}));
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        const std::size_t j = split_rng.uniform_int(i + 1);
        std::swap(perm[i], perm[j]);
    }
    std::size_t train_count = static_cast<std::size_t>(
        std::lround(static_cast<double>(clips.size()) * config.train_fraction));
    train_count = std::min(std::max<std::size_t>(train_count, 1), clips.size() - 1);

    // Per-length contexts: embedder fitted on training windows, clean test
    // windows embedded once as the reference distribution.
    std::vector<LengthContext> contexts;
    contexts.reserve(config.lengths.size());
    for (int length : config.lengths) {
        LengthContext ctx;
        ctx.length = length;

        std::vector<MotionClip> train_windows;
        for (std::size_t i = 0; i < train_count; ++i) {
            const MotionClip& clip = clips[perm[i]];
            if (clip.frames() < length) continue;  // short clips don't contribute
            for (auto& w : window(clip, length, length)) train_windows.push_back(std::move(w));
        }
        for (std::size_t i = train_count; i < clips.size(); ++i) {
            const MotionClip& clip = clips[perm[i]];
            if (clip.frames() < length) continue;
            for (auto& w : window(clip, length, length)) ctx.test_windows.push_back(std::move(w));
        }
        if (train_windows.empty() || ctx.test_windows.empty()) {
            throw InsufficientData("no windows of length " + std::to_string(length) +
                                   " in the train or test split");
        }

        ctx.model = fit_pca_data(stack_images(train_windows), clips.front().skeleton.bones(),
                                 length, config.latent_dim);
        ctx.reference.push_back(fit_gaussian(embed_all(ctx.model, stack_images(ctx.test_windows))));
        contexts.push_back(std::move(ctx));
    }

    // Flatten the sweep into independent (cell, repetition) tasks, each with
    // a pre-derived RNG stream so scheduling cannot affect results.
    std::vector<Cell> cells;
    for (std::size_t li = 0; li < contexts.size(); ++li) {
        const int length = contexts[li].length;
        for (double z : config.gaussian_grid) {
            cells.push_back({NoiseKind::gaussian, static_cast<int>(li), z});
        }
        for (double z : config.salt_pepper_grid) {
            cells.push_back({NoiseKind::salt_pepper, static_cast<int>(li), z});
        }
        for (int z : config.temporal_grid) {
            if (z > length) continue;  // a temporal burst must fit the window
            cells.push_back({NoiseKind::temporal, static_cast<int>(li), static_cast<double>(z)});
        }
    }

    std::vector<Task> tasks;
    tasks.reserve(cells.size() * config.repetitions);
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& cell = cells[ci];
        for (int rep = 0; rep < config.repetitions; ++rep) {
            const std::uint64_t seed = derive_seed(
                config.master_seed,
                {static_cast<std::uint64_t>(kind_rank(cell.kind)),
                 std::bit_cast<std::uint64_t>(cell.zeta), static_cast<std::uint64_t>(rep),
                 static_cast<std::uint64_t>(contexts[cell.length_index].length)});
            tasks.push_back({static_cast<int>(ci), rep, seed});
        }
    }

    std::vector<std::vector<double>> results(cells.size(),
                                             std::vector<double>(config.repetitions, 0.0));
    const int worker_count = std::max(1, threads);
    std::atomic<std::size_t> next_task{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t t = next_task.fetch_add(1);
            if (t >= tasks.size() || failed.load()) break;
            const Task& task = tasks[t];
            try {
                results[task.cell][task.rep] =
                    run_cell_rep(contexts[cells[task.cell].length_index], cells[task.cell],
                                 task.seed);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure.empty()) failure = e.what();
            }
        }
    };

    if (worker_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw RuntimeFailure("experiment cell failed: " + failure);

    ExperimentReport report;
    report.config_hash = config.hash();
    report.version = kVersion;
    report.cells.reserve(cells.size());
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const auto& values = results[ci];
        const double mean =
            std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        double stddev = 0.0;
        if (values.size() > 1) {
            double accum = 0.0;
            for (double v : values) accum += (v - mean) * (v - mean);
            stddev = std::sqrt(accum / static_cast<double>(values.size() - 1));
        }
        ReportCell cell;
        cell.kind = cells[ci].kind;
        cell.length = contexts[cells[ci].length_index].length;
        cell.zeta = cells[ci].zeta;
        cell.mean_fmd = mean;
        cell.std_fmd = stddev;
        cell.reps = config.repetitions;
        report.cells.push_back(cell);
    }
    std::sort(report.cells.begin(), report.cells.end(), [](const ReportCell& a, const ReportCell& b) {
        if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind);
        if (a.length != b.length) return a.length < b.length;
        return a.zeta < b.zeta;
    });
    return report;
}

}  // namespace fmd
