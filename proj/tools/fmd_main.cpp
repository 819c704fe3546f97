#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fmd/embedder.hpp"
#include "fmd/errors.hpp"
#include "fmd/experiment.hpp"
#include "fmd/frechet.hpp"
#include "fmd/motion.hpp"
#include "fmd/motion_image.hpp"
#include "fmd/motion_io.hpp"
#include "fmd/noise.hpp"
#include "fmd/report_io.hpp"
#include "fmd/rng.hpp"
#include "fmd/version.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> sorted_files(const std::string& dir) {
    if (!fs::is_directory(dir)) throw fmd::ValidationError("'" + dir + "' is not a directory");
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw fmd::ValidationError("directory '" + dir + "' holds no files");
    return paths;
}

std::vector<fmd::MotionClip> load_clips(const std::string& input) {
    std::vector<fmd::MotionClip> clips;
    if (fs::is_directory(input)) {
        for (const auto& p : sorted_files(input)) clips.push_back(fmd::load_motion(p));
    } else {
        clips.push_back(fmd::load_motion(input));
    }
    return clips;
}

std::string first_token_of_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fmd::IOError("cannot open '" + path + "' for reading");
    std::string token;
    in >> token;
    return token;
}

fmd::GaussianStats stats_from_any(const std::string& path) {
    const std::string magic = first_token_of_file(path);
    if (magic == "STATS1") return fmd::load_stats(path);
    if (magic == "FEAT1") return fmd::fit_gaussian(fmd::load_features(path));
    throw fmd::ValidationError("'" + path + "' is neither a STATS1 nor a FEAT1 file");
}

// Windows every clip to the model's input width and stacks the images.
Eigen::MatrixXd images_for_model(const std::vector<fmd::MotionClip>& clips,
                                 const fmd::EmbedderModel& model, int stride,
                                 const std::string& png_dir) {
    std::vector<fmd::MotionImage> images;
    for (const auto& clip : clips) {
        for (const auto& w : fmd::window(clip, model.input_width, stride)) {
            images.push_back(fmd::to_image(fmd::to_directional(w)));
        }
    }
    if (images.empty()) throw fmd::ValidationError("no windows produced from the input clips");
    if (!png_dir.empty()) {
        fs::create_directories(png_dir);
        for (std::size_t i = 0; i < images.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "window_%05zu.png", i);
            fmd::write_png(images[i], (fs::path(png_dir) / name).string());
        }
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(images.size()), images.front().pixels.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].height != model.input_height || images[i].width != model.input_width) {
            throw fmd::DimensionMismatch("window image does not match the model's input size");
        }
        X.row(static_cast<Eigen::Index>(i)) = images[i].pixels.transpose();
    }
    return X;
}

int run(int argc, char** argv) {
    CLI::App app{"Frechet Motion Distance toolkit"};
    app.set_version_flag("--version", std::string(fmd::kVersion));
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic MOT1 dataset");
    std::uint64_t synth_seed = 42;
    int synth_clips = 100, synth_joints = 17, synth_frames = 64;
    double synth_fps = 30.0;
    std::string synth_out = ".";
    synth->add_option("--seed", synth_seed, "Master seed");
    synth->add_option("--clips", synth_clips, "Number of clips")->check(CLI::PositiveNumber);
    synth->add_option("--joints", synth_joints, "Joint count (17 selects the humanoid topology)")
        ->check(CLI::Range(2, 1000));
    synth->add_option("--frames", synth_frames, "Frames per clip")->check(CLI::PositiveNumber);
    synth->add_option("--fps", synth_fps, "Frame rate")->check(CLI::PositiveNumber);
    synth->add_option("--out-dir", synth_out, "Output directory");

    // train-embedder
    auto* train = app.add_subcommand("train-embedder", "Fit a PCA embedder on MOT1 clips");
    std::string train_in, train_out = "model.fmdm";
    int train_length = 64, train_stride = 0, train_dim = 64;
    train->add_option("--in-dir", train_in, "Directory of MOT1 clips")->required();
    train->add_option("--length", train_length, "Window length (frames)")
        ->check(CLI::PositiveNumber);
    train->add_option("--stride", train_stride, "Window stride (default: length)");
    train->add_option("--latent-dim", train_dim, "Latent dimension")->check(CLI::PositiveNumber);
    train->add_option("--out", train_out, "Output model file");

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "Embed MOT1 clips into FEAT1 features");
    std::string embed_in, embed_model, embed_out = "features.feat1", embed_png;
    int embed_stride = 0;
    embed_cmd->add_option("--in", embed_in, "MOT1 file or directory")->required();
    embed_cmd->add_option("--model", embed_model, "Embedder model file")->required();
    embed_cmd->add_option("--out", embed_out, "Output FEAT1 file");
    embed_cmd->add_option("--stride", embed_stride, "Window stride (default: model width)");
    embed_cmd->add_option("--export-png", embed_png,
                          "Also dump each window as an 8-bit PNG (lossy, inspection only)");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Fit Gaussian moments of a FEAT1 file");
    std::string stats_in, stats_out = "stats.stats1";
    stats_cmd->add_option("--in", stats_in, "FEAT1 file")->required();
    stats_cmd->add_option("--out", stats_out, "Output STATS1 file");

    // score
    auto* score = app.add_subcommand("score", "Frechet Motion Distance between two sets");
    std::string score_ref, score_gen;
    score->add_option("--ref", score_ref, "Reference STATS1 or FEAT1 file")->required();
    score->add_option("--gen", score_gen, "Generated STATS1 or FEAT1 file")->required();

    // perturb
    auto* perturb = app.add_subcommand("perturb", "Apply a noise model to MOT1 clips");
    std::string pert_in, pert_out, pert_kind = "gaussian";
    double pert_zeta = 0.0;
    std::uint64_t pert_seed = 0;
    perturb->add_option("--in", pert_in, "MOT1 file or directory")->required();
    perturb->add_option("--out", pert_out, "Output file or directory")->required();
    perturb->add_option("--kind", pert_kind, "gaussian | salt_pepper | temporal");
    perturb->add_option("--zeta", pert_zeta, "Noise intensity")->required();
    perturb->add_option("--seed", pert_seed, "Noise seed");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "Run the degradation sweep");
    std::string exp_config, exp_out_dir = ".", exp_format = "csv";
    std::vector<std::string> exp_sets;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    int exp_threads = 1;
    exp_cmd->add_option("--config", exp_config, "Config file (key = value lines)");
    exp_cmd->add_option("--set", exp_sets, "Override a config key, e.g. --set repetitions=5");
    exp_cmd->add_option("--seed", exp_seed, "Override master_seed")
        ->each([&](const std::string&) { exp_seed_set = true; });
    exp_cmd->add_option("--out-dir", exp_out_dir, "Output directory");
    exp_cmd->add_option("--format", exp_format, "csv | json | svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    exp_cmd->add_option("--threads", exp_threads, "Worker threads (never affects results)")
        ->check(CLI::PositiveNumber);

    // plot
    auto* plot = app.add_subcommand("plot", "Render a report CSV as SVG (or re-emit CSV)");
    std::string plot_in, plot_out, plot_format = "svg";
    plot->add_option("--in", plot_in, "Report CSV")->required();
    plot->add_option("--out", plot_out, "Output file")->required();
    plot->add_option("--format", plot_format, "svg | csv")
        ->check(CLI::IsMember({"svg", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage errors
    }

    if (*synth) {
        const fmd::Skeleton skeleton =
            synth_joints == 17 ? fmd::Skeleton::humanoid17() : fmd::Skeleton::chain(synth_joints);
        const auto clips =
            fmd::synth_dataset(synth_seed, synth_clips, skeleton, synth_frames, synth_fps);
        fs::create_directories(synth_out);
        for (std::size_t i = 0; i < clips.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "clip_%05zu.mot1", i);
            fmd::save_motion(clips[i], (fs::path(synth_out) / name).string());
        }
        std::cout << "wrote " << clips.size() << " clips to " << synth_out << '\n';
    } else if (*train) {
        if (train_stride <= 0) train_stride = train_length;
        std::vector<fmd::MotionImage> images;
        for (const auto& p : sorted_files(train_in)) {
            const fmd::MotionClip clip = fmd::load_motion(p);
            if (clip.frames() < train_length) continue;
            for (const auto& w : fmd::window(clip, train_length, train_stride)) {
                images.push_back(fmd::to_image(fmd::to_directional(w)));
            }
        }
        const fmd::EmbedderModel model = fmd::fit_pca(images, train_dim);
        fmd::save_model(model, train_out);
        std::cout << "fitted on " << images.size() << " windows; model written to " << train_out
                  << '\n';
    } else if (*embed_cmd) {
        const fmd::EmbedderModel model = fmd::load_model(embed_model);
        if (embed_stride <= 0) embed_stride = model.input_width;
        const Eigen::MatrixXd X =
            images_for_model(load_clips(embed_in), model, embed_stride, embed_png);
        fmd::save_features(fmd::embed_all(model, X), embed_out);
        std::cout << "embedded " << X.rows() << " windows to " << embed_out << '\n';
    } else if (*stats_cmd) {
        fmd::save_stats(fmd::fit_gaussian(fmd::load_features(stats_in)), stats_out);
        std::cout << "stats written to " << stats_out << '\n';
    } else if (*score) {
        const fmd::GaussianStats ref = stats_from_any(score_ref);
        const fmd::GaussianStats gen = stats_from_any(score_gen);
        const double value = fmd::frechet_distance(ref, gen);
        char line[64];
        std::snprintf(line, sizeof(line), "FMD = %.6g\n", value);
        std::cout << line;
        std::cout << "estimator: unbiased covariance (n-1), d=" << ref.dim()
                  << ", n_ref=" << ref.n << ", n_gen=" << gen.n << '\n';
    } else if (*perturb) {
        fmd::NoiseSpec spec;
        spec.kind = fmd::noise_kind_from_string(pert_kind);
        spec.zeta = pert_zeta;
        spec.seed = pert_seed;
        if (fs::is_directory(pert_in)) {
            fs::create_directories(pert_out);
            const auto paths = sorted_files(pert_in);
            for (std::size_t i = 0; i < paths.size(); ++i) {
                fmd::NoiseSpec per_file = spec;
                per_file.seed = fmd::derive_seed(spec.seed, {static_cast<std::uint64_t>(i)});
                const fmd::MotionClip noisy =
                    fmd::apply_noise(fmd::load_motion(paths[i]), per_file);
                fmd::save_motion(noisy,
                                 (fs::path(pert_out) / fs::path(paths[i]).filename()).string());
            }
            std::cout << "perturbed " << paths.size() << " clips into " << pert_out << '\n';
        } else {
            fmd::save_motion(fmd::apply_noise(fmd::load_motion(pert_in), spec), pert_out);
            std::cout << "perturbed clip written to " << pert_out << '\n';
        }
    } else if (*exp_cmd) {
        fmd::ExperimentConfig config;
        if (!exp_config.empty()) config = fmd::load_config(exp_config);
        for (const auto& assignment : exp_sets) fmd::apply_config_override(config, assignment);
        if (exp_seed_set) config.master_seed = exp_seed;
        const fmd::ExperimentReport report = fmd::run_experiment(config, exp_threads);
        fs::create_directories(exp_out_dir);
        const fs::path out = fs::path(exp_out_dir) / ("report." + exp_format);
        if (exp_format == "csv") {
            fmd::save_report_csv(report, out.string());
        } else if (exp_format == "json") {
            fmd::save_report_json(report, out.string());
        } else {
            fmd::save_report_svg(report, out.string());
        }
        std::cout << "report written to " << out.string() << '\n';
    } else if (*plot) {
        const fmd::ExperimentReport report = fmd::load_report_csv(plot_in);
        if (plot_format == "svg") {
            fmd::save_report_svg(report, plot_out);
        } else {
            fmd::save_report_csv(report, plot_out);
        }
        std::cout << "plot written to " << plot_out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fmd::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
