// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seedobj/seedobj.hpp"

namespace seedobj::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_io = 3 };

/// Everything a run resolved from its flags. Emitted by --dump-config.
struct RunConfig {
    std::string subcommand;
    std::string image, seeds, output, manifest, gt, pred, objectness, background_mask;
    std::string connectivity = "faces";
    double w = ObjectnessConfig{}.w;
    bool boundary_as_background = true;
    std::optional<int> num_classes;

    bool normalize = true;
    bool equalize = false;
    bool diffuse = false;
    DiffusionParams diffusion;
    std::vector<double> channel_mean, channel_std;

    std::vector<double> candidates{5, 10, 20, 50, 100, 200};
    std::string format = "text";

    SynthSpec synth;
    std::vector<std::size_t> synth_shape{256, 256};

    std::vector<double> lambda{1, 1, 1};
    double alpha_point = losses::default_point_alpha;
    double alpha_background = losses::default_background_alpha;
    std::vector<double> beta;
    double beta_background = 1.0;
    std::vector<int> present, absent;
    bool mean_point = false;

    unsigned jobs = 1;
    bool json_log = false;
    int verbosity = 0;

    Connectivity connectivity_kind() const {
        return connectivity == "full" ? Connectivity::full : Connectivity::faces;
    }

    ObjectnessConfig objectness_config() const {
        return {w, connectivity_kind(), boundary_as_background};
    }

    PreprocessChain preprocess_chain() const {
        PreprocessChain chain;
        chain.normalize = normalize;
        chain.equalize = equalize;
        if (diffuse) chain.diffusion = diffusion;
        if (!channel_mean.empty() || !channel_std.empty())
            chain.channel_targets = PreprocessChain::ChannelTargets{channel_mean, channel_std};
        return chain;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["subcommand"] = subcommand;
        j["version"] = version;
        auto put = [&](const char* key, const std::string& v) {
            if (!v.empty()) j[key] = v;
        };
        put("image", image);
        put("seeds", seeds);
        put("output", output);
        put("manifest", manifest);
        put("gt", gt);
        put("pred", pred);
        put("objectness", objectness);
        put("background_mask", background_mask);
        j["connectivity"] = connectivity;
        j["w"] = w;
        j["boundary_as_background"] = boundary_as_background;
        if (num_classes) j["num_classes"] = *num_classes;
        j["preprocess"] = {{"normalize", normalize},
                           {"equalize", equalize},
                           {"diffuse", diffuse},
                           {"kappa", diffusion.kappa},
                           {"step", diffusion.step},
                           {"iterations", diffusion.iterations},
                           {"channel_mean", channel_mean},
                           {"channel_std", channel_std}};
        j["candidates"] = candidates;
        j["synth"] = {{"shape", synth_shape},
                      {"objects", synth.n_objects},
                      {"classes", synth.num_classes},
                      {"radius_min", synth.radius_min},
                      {"radius_max", synth.radius_max},
                      {"background", synth.background_mean},
                      {"contrast", synth.contrast},
                      {"noise", synth.noise_sigma},
                      {"rng_seed", synth.rng_seed}};
        j["losses"] = {{"lambda", lambda},
                       {"alpha_point", alpha_point},
                       {"alpha_background", alpha_background},
                       {"beta", beta},
                       {"beta_background", beta_background},
                       {"present", present},
                       {"absent", absent},
                       {"mean_point", mean_point}};
        j["jobs"] = jobs;
        j["format"] = format;
        return j;
    }
};

/// Event log on stderr: plain lines, or one JSON object per line with --json.
class Logger {
public:
    Logger(std::ostream& err, bool json, int verbosity)
        : err_(err), json_(json), verbosity_(verbosity) {}

    void info(const std::string& event, nlohmann::ordered_json fields = nlohmann::ordered_json::object()) {
        if (verbosity_ < 1 && !json_) return;
        emit("info", event, std::move(fields), "");
    }

    void error(int code, const std::string& message) {
        emit("error", "error", {{"exit_code", code}}, message);
    }

    void raw(const nlohmann::ordered_json& j) {
        std::lock_guard lock(mutex_);
        err_ << j.dump() << '\n';
    }

private:
    void emit(const char* level, const std::string& event, nlohmann::ordered_json fields,
              const std::string& message) {
        std::lock_guard lock(mutex_);
        if (json_) {
            nlohmann::ordered_json j;
            j["level"] = level;
            j["event"] = event;
            if (!message.empty()) j["message"] = message;
            for (auto& [k, v] : fields.items()) j[k] = v;
            err_ << j.dump() << '\n';
            return;
        }
        if (!message.empty()) {
            err_ << "seedobj: " << level << ": " << message << '\n';
            return;
        }
        err_ << "seedobj: " << event;
        for (auto& [k, v] : fields.items()) err_ << ' ' << k << '=' << v.dump();
        err_ << '\n';
    }

    std::ostream& err_;
    bool json_;
    int verbosity_;
    std::mutex mutex_;
};

namespace detail {

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return exit_data;
    return exit_io;
}

inline std::string fixed(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

inline nlohmann::ordered_json iou_json(const IouReport& r) {
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (const auto& v : r.per_class) per.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json());
    return {{"per_class", per}, {"miou", r.mean}};
}

inline std::string iou_cells(const IouReport& r) {
    std::string out;
    for (const auto& v : r.per_class) {
        std::string cell = v ? fixed(*v) : "   -  ";
        out += "  " + std::string(8 - std::min<std::size_t>(8, cell.size()), ' ') + cell;
    }
    return out;
}

inline std::string class_header(std::size_t n) {
    std::string out;
    for (std::size_t c = 0; c < n; ++c) {
        std::string h = "class" + std::to_string(c);
        out += "  " + std::string(8 - std::min<std::size_t>(8, h.size()), ' ') + h;
    }
    return out;
}

/// Label map from either an objectness tensor (argmax) or a label tensor.
inline LabelMap load_prediction(const std::string& path, int& num_classes_hint) {
    const io::Tensor t = io::read_tensor(path);
    if (t.dtype == io::Dtype::f32 && t.channels == 1 && (t.shape.size() == 3 || t.shape.size() == 4)) {
        const ObjectnessMap m = io::objectness_from_tensor(t, path);
        num_classes_hint = std::max(num_classes_hint, m.num_classes);
        return threshold_predict(m);
    }
    return io::labels_from_tensor(t, path);
}

inline int max_label(const LabelMap& m) {
    return m.labels.empty() ? 0 : *std::max_element(m.labels.begin(), m.labels.end());
}

} // namespace detail

inline void run_objectness_one(const RunConfig& cfg, const std::string& image,
                               const std::string& seeds, const std::string& output, Logger& log) {
    const Grid g = io::read_image(image);
    const SeedSet s = io::read_seeds(seeds, g.shape(), cfg.num_classes);
    ObjectnessMap m;
    try {
        m = generate_objectness(g, s, cfg.objectness_config(), cfg.preprocess_chain());
    } catch (const ValidationError& e) {
        throw ValidationError(image + " with " + seeds + ": " + e.what());
    }
    io::write_objectness(m, output);
    log.info("written", {{"output", output},
                         {"background_mask", io::background_path(output).string()},
                         {"classes", m.num_classes},
                         {"seeds", s.seeds.size()}});
}

inline int run_objectness(const RunConfig& cfg, Logger& log) {
    if (cfg.manifest.empty()) {
        run_objectness_one(cfg, cfg.image, cfg.seeds, cfg.output, log);
        return exit_ok;
    }

    struct Job {
        std::string image, seeds, output;
        std::size_t line;
    };
    std::ifstream in(cfg.manifest);
    if (!in) throw IoError("cannot open manifest " + cfg.manifest);
    std::vector<Job> jobs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 3)
            throw ValidationError(cfg.manifest + ": line " + std::to_string(line_no) +
                                  ": expected image,seeds,output");
        jobs.push_back({f[0], f[1], f[2], line_no});
    }

    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{exit_ok};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                run_objectness_one(cfg, jobs[k].image, jobs[k].seeds, jobs[k].output, log);
            } catch (const std::exception& e) {
                const int code = detail::exit_code_for(e);
                log.error(code, cfg.manifest + " line " + std::to_string(jobs[k].line) + ": " +
                                    e.what());
                int expected = worst.load();
                while (code > expected && !worst.compare_exchange_weak(expected, code)) {}
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(jobs.size())));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    return worst.load();
}

inline int run_preprocess(const RunConfig& cfg, Logger& log) {
    const Grid g = io::read_image(cfg.image);
    const Grid out = apply(cfg.preprocess_chain(), g);
    io::write_grid(cfg.output, out);
    log.info("written", {{"output", cfg.output}});
    return exit_ok;
}

inline int run_synth(RunConfig cfg, std::ostream& out, Logger& log) {
    cfg.synth.shape = Shape(std::span<const std::size_t>(cfg.synth_shape));
    const SynthSample sample = synth_generate(cfg.synth);
    const std::string image = cfg.output + ".tns";
    const std::string gt = cfg.output + ".gt.tns";
    const std::string seeds = cfg.output + ".seeds.csv";
    const std::vector<std::pair<std::filesystem::path, std::string>> files{
        {image, io::encode_tensor(io::grid_to_tensor(sample.image))},
        {gt, io::encode_tensor({sample.truth.shape.extents(), 1, io::Dtype::u8,
                                {sample.truth.labels.begin(), sample.truth.labels.end()}})},
        {seeds, io::format_seeds(sample.seeds)}};
    io::commit_files(files);
    if (cfg.format == "json")
        out << nlohmann::ordered_json{{"image", image}, {"gt", gt}, {"seeds", seeds},
                                      {"objects", sample.seeds.seeds.size()},
                                      {"classes", sample.seeds.num_classes}}.dump()
            << '\n';
    else
        out << "image " << image << "\ngt    " << gt << "\nseeds " << seeds << '\n';
    log.info("written", {{"image", image}, {"gt", gt}, {"seeds", seeds}});
    return exit_ok;
}

inline int run_eval(const RunConfig& cfg, std::ostream& out, Logger&) {
    const LabelMap gt = io::read_labels(cfg.gt);
    int classes = cfg.num_classes.value_or(0);
    const LabelMap pred = detail::load_prediction(cfg.pred, classes);
    if (!(pred.shape == gt.shape))
        throw ValidationError(cfg.pred + ": shape " + to_string(pred.shape) +
                              " does not match ground truth " + cfg.gt + " " + to_string(gt.shape));
    classes = std::max({classes, detail::max_label(gt) + 1, detail::max_label(pred) + 1, 2});
    const IouReport r = iou(pred, gt, classes);
    if (cfg.format == "json") {
        auto j = detail::iou_json(r);
        j["note"] = "classes absent from both maps are excluded from miou";
        out << j.dump() << '\n';
    } else {
        out << detail::class_header(r.per_class.size()) << "      mIoU\n"
            << detail::iou_cells(r) << "  " << std::setw(8) << detail::fixed(r.mean) << '\n'
            << "(classes absent from both maps are shown as '-' and excluded from mIoU)\n";
    }
    return exit_ok;
}

inline int run_sweep(const RunConfig& cfg, std::ostream& out, Logger& log) {
    const Grid g = io::read_image(cfg.image);
    const SeedSet s = io::read_seeds(cfg.seeds, g.shape(), cfg.num_classes);
    const LabelMap gt = io::read_labels(cfg.gt);
    if (detail::max_label(gt) >= s.num_classes)
        throw ValidationError(cfg.gt + ": label " + std::to_string(detail::max_label(gt)) +
                              " exceeds the seed classes; pass --classes");
    const SweepResult r = sweep_w(g, s, gt, cfg.candidates, cfg.objectness_config(),
                                  cfg.preprocess_chain());
    if (cfg.format == "json") {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const SweepRow& row : r.table) {
            auto j = detail::iou_json(row.score);
            j = nlohmann::ordered_json{{"w", row.w}, {"per_class", j["per_class"]},
                                       {"miou", row.score.mean}};
            rows.push_back(j);
        }
        out << nlohmann::ordered_json{{"best_w", r.best_w}, {"best_miou", r.best_miou}, {"table", rows}}
                   .dump()
            << '\n';
    } else {
        out << "         w" << detail::class_header(static_cast<std::size_t>(s.num_classes))
            << "      mIoU\n";
        for (const SweepRow& row : r.table)
            out << std::setw(10) << row.w << detail::iou_cells(row.score) << "  " << std::setw(8)
                << detail::fixed(row.score.mean) << (row.w == r.best_w ? "  *" : "") << '\n';
        out << "best w = " << r.best_w << " (mIoU " << detail::fixed(r.best_miou) << ")\n";
    }
    if (!cfg.output.empty()) {
        ObjectnessConfig oc = cfg.objectness_config();
        oc.w = r.best_w;
        io::write_objectness(generate_objectness(g, s, oc, cfg.preprocess_chain()), cfg.output);
        log.info("written", {{"output", cfg.output}, {"w", r.best_w}});
    }
    return exit_ok;
}

inline int run_losses(const RunConfig& cfg, std::ostream& out, Logger&) {
    const ObjectnessMap pred_map = io::objectness_from_tensor(io::read_tensor(cfg.pred), cfg.pred);
    losses::PredictionField s{pred_map.num_classes, pred_map.pixel_count(), pred_map.probability};
    const Shape& shape = pred_map.shape;

    std::vector<losses::PointLabel> points;
    SeedSet seeds;
    if (!cfg.seeds.empty()) {
        seeds = io::read_seeds(cfg.seeds, shape, s.num_classes);
        for (const Seed& seed : seeds.seeds)
            points.push_back({shape.linear(seed.location), seed.class_id, cfg.alpha_point});
    }
    if (!cfg.background_mask.empty()) {
        const io::Tensor mask = io::read_tensor(cfg.background_mask);
        if (mask.shape != shape.extents() || mask.channels != 1)
            throw ValidationError(cfg.background_mask + ": mask shape does not match " + cfg.pred);
        std::vector<char> labeled(shape.count(), 0);
        for (const auto& p : points) labeled[p.pixel] = 1;
        for (std::size_t i = 0; i < mask.values.size(); ++i)
            if (mask.values[i] != 0.0 && !labeled[i])
                points.push_back({i, background_class, cfg.alpha_background});
    }

    std::vector<double> beta = cfg.beta;
    if (beta.empty()) {
        beta.assign(static_cast<std::size_t>(s.num_classes), 1.0);
        beta[0] = cfg.beta_background;
    }

    losses::ImagePresence pres{cfg.present, cfg.absent};
    if (pres.present.empty() && pres.absent.empty() && !seeds.seeds.empty()) {
        for (int c = 1; c < s.num_classes; ++c) {
            const bool seen = std::any_of(seeds.seeds.begin(), seeds.seeds.end(),
                                          [&](const Seed& x) { return x.class_id == c; });
            (seen ? pres.present : pres.absent).push_back(c);
        }
    }

    nlohmann::ordered_json j;
    losses::LossWeights lw{cfg.lambda.at(0), cfg.lambda.at(1), cfg.lambda.at(2)};
    double total = 0.0;
    if (!points.empty()) {
        j["point"] = losses::point_loss(s, points, cfg.mean_point);
        total += lw.point * j["point"].get<double>();
    }
    if (!cfg.objectness.empty()) {
        const ObjectnessMap target = io::read_objectness(cfg.objectness);
        if (!(target.shape == shape) || target.num_classes != s.num_classes)
            throw ValidationError(cfg.objectness + ": objectness shape does not match " + cfg.pred);
        j["objectness"] = losses::objectness_loss(s, {target.probability, beta});
        total += lw.objectness * j["objectness"].get<double>();
    }
    if (!pres.present.empty() || !pres.absent.empty()) {
        j["image"] = losses::image_level_loss(s, pres);
        total += lw.image * j["image"].get<double>();
    }
    if (j.empty())
        throw ValidationError("losses eval: nothing to evaluate; pass --seeds, --background-mask, "
                              "--objectness or --present/--absent");
    j["total"] = total;
    if (cfg.format == "json") {
        out << j.dump() << '\n';
    } else {
        for (auto& [k, v] : j.items())
            out << std::left << std::setw(12) << k << std::right << std::setprecision(9)
                << v.get<double>() << '\n';
    }
    return exit_ok;
}

/// Parses argv, runs one subcommand and returns its exit code:
/// 0 success, 1 usage error, 2 data validation error, 3 I/O error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    RunConfig cfg;
    bool dump_config = false;

    CLI::App app{"Soft objectness maps and background labels from point annotations"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);
    app.add_flag("--json", cfg.json_log, "Log events as JSON lines on stderr");
    app.add_flag("-v,--verbose", cfg.verbosity, "Log progress events");
    app.add_flag("--dump-config", dump_config, "Print the resolved configuration as JSON on stderr");

    auto add_objectness_flags = [&](CLI::App* sub) {
        sub->add_option("-w,--decay", cfg.w, "Objectness decay rate w (>= 0)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--connectivity", cfg.connectivity, "Neighborhood: faces or full")
            ->check(CLI::IsMember({"faces", "full"}));
        sub->add_flag("!--no-boundary-background", cfg.boundary_as_background,
                      "Keep region boundaries soft instead of hard background");
        sub->add_option("--classes", cfg.num_classes,
                        "Number of classes including background (default: max seed class + 1)")
            ->check(CLI::Range(2, 65536));
    };
    auto add_preprocess_flags = [&](CLI::App* sub) {
        sub->add_flag("!--no-normalize", cfg.normalize, "Skip min-max normalization");
        sub->add_flag("--equalize", cfg.equalize, "256-bin histogram equalization");
        sub->add_flag("--diffuse", cfg.diffuse, "Perona-Malik anisotropic diffusion");
        sub->add_option("--kappa", cfg.diffusion.kappa, "Diffusion edge threshold")
            ->check(CLI::PositiveNumber);
        sub->add_option("--step", cfg.diffusion.step, "Diffusion time step")
            ->check(CLI::PositiveNumber);
        sub->add_option("--iterations", cfg.diffusion.iterations, "Diffusion iterations");
        sub->add_option("--channel-mean", cfg.channel_mean, "Per-channel target means")
            ->delimiter(',');
        sub->add_option("--channel-std", cfg.channel_std, "Per-channel target stds")
            ->delimiter(',');
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "Output format: text or json")
            ->check(CLI::IsMember({"text", "json"}));
    };

    auto* obj = app.add_subcommand("objectness", "Image + seeds -> objectness TensorFile + .bg mask");
    auto* obj_image = obj->add_option("-i,--image", cfg.image, "Input image (PNG, TIFF, TensorFile)");
    auto* obj_seeds = obj->add_option("-s,--seeds", cfg.seeds, "Seed CSV");
    auto* obj_out = obj->add_option("-o,--output", cfg.output, "Output TensorFile");
    auto* obj_manifest =
        obj->add_option("--manifest", cfg.manifest, "CSV of image,seeds,output lines (batch mode)");
    obj->add_option("-j,--jobs", cfg.jobs, "Concurrent files in batch mode")->check(CLI::Range(1u, 256u));
    obj_manifest->excludes(obj_image)->excludes(obj_seeds)->excludes(obj_out);
    add_objectness_flags(obj);
    add_preprocess_flags(obj);

    auto* pre = app.add_subcommand("preprocess", "Condition an image and write it as a TensorFile");
    pre->add_option("-i,--image", cfg.image, "Input image")->required();
    pre->add_option("-o,--output", cfg.output, "Output TensorFile")->required();
    add_preprocess_flags(pre);

    auto* syn = app.add_subcommand("synth", "Generate a synthetic blob image, ground truth and seeds");
    syn->add_option("-o,--output", cfg.output,
                    "Output prefix: writes <prefix>.tns, <prefix>.gt.tns, <prefix>.seeds.csv")
        ->required();
    syn->add_option("--shape", cfg.synth_shape, "Extents, slowest axis first (e.g. 256,256)")
        ->delimiter(',')
        ->expected(2, 3);
    syn->add_option("--objects", cfg.synth.n_objects, "Number of blobs")->check(CLI::PositiveNumber);
    syn->add_option("--classes", cfg.synth.num_classes, "Classes including background")
        ->check(CLI::Range(2, 255));
    syn->add_option("--radius-min", cfg.synth.radius_min, "Smallest semi-axis (pixels)");
    syn->add_option("--radius-max", cfg.synth.radius_max, "Largest semi-axis (pixels)");
    syn->add_option("--background", cfg.synth.background_mean, "Background intensity");
    syn->add_option("--contrast", cfg.synth.contrast, "Intensity step per class");
    syn->add_option("--noise", cfg.synth.noise_sigma, "Gaussian noise sigma");
    syn->add_option("--rng-seed", cfg.synth.rng_seed, "Random seed");
    add_format(syn);

    auto* ev = app.add_subcommand("eval", "Per-class IoU and mIoU of a prediction");
    ev->add_option("--pred", cfg.pred, "Objectness TensorFile or label TensorFile")->required();
    ev->add_option("--gt", cfg.gt, "Ground-truth label TensorFile")->required();
    ev->add_option("--classes", cfg.num_classes, "Number of classes including background");
    add_format(ev);

    auto* sw = app.add_subcommand("sweep", "Pick w by mIoU against ground truth");
    sw->add_option("-i,--image", cfg.image, "Input image")->required();
    sw->add_option("-s,--seeds", cfg.seeds, "Seed CSV")->required();
    sw->add_option("--gt", cfg.gt, "Ground-truth label TensorFile")->required();
    sw->add_option("--candidates", cfg.candidates, "Candidate w values")->delimiter(',');
    sw->add_option("-o,--output", cfg.output, "Optional objectness output at the best w");
    add_objectness_flags(sw);
    add_preprocess_flags(sw);
    add_format(sw);

    auto* loss = app.add_subcommand("losses", "Loss kernels");
    loss->require_subcommand(1);
    auto* le = loss->add_subcommand("eval", "Evaluate the weak-supervision losses of a prediction");
    le->add_option("--pred", cfg.pred, "Prediction TensorFile, f32 shape (C, *grid)")->required();
    le->add_option("-s,--seeds", cfg.seeds, "Annotated points (seed CSV)");
    le->add_option("--background-mask", cfg.background_mask, "Generated background mask (.bg)");
    le->add_option("--objectness", cfg.objectness, "Objectness TensorFile target");
    le->add_option("--lambda", cfg.lambda, "Weights of point, objectness, image terms")
        ->delimiter(',')
        ->expected(3);
    le->add_option("--alpha-point", cfg.alpha_point, "Weight of annotated points")
        ->check(CLI::PositiveNumber);
    le->add_option("--alpha-background", cfg.alpha_background, "Weight of generated background")
        ->check(CLI::PositiveNumber);
    le->add_option("--beta", cfg.beta, "Per-class objectness weights")->delimiter(',');
    le->add_option("--beta-background", cfg.beta_background, "Background objectness weight")
        ->check(CLI::PositiveNumber);
    le->add_option("--present", cfg.present, "Classes present in the image")->delimiter(',');
    le->add_option("--absent", cfg.absent, "Classes absent from the image")->delimiter(',');
    le->add_flag("--mean-point", cfg.mean_point, "Average the point term instead of summing");
    add_format(le);

    try {
        app.parse(argc, argv);
        if (obj->parsed() && cfg.manifest.empty() &&
            (cfg.image.empty() || cfg.seeds.empty() || cfg.output.empty()))
            throw CLI::RequiredError("objectness needs -i, -s and -o (or --manifest)");
        for (double l : cfg.lambda)
            if (l < 0) throw CLI::ValidationError("--lambda", "weights must be non-negative");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    Logger log(err, cfg.json_log, cfg.verbosity);
    for (CLI::App* sub : {obj, pre, syn, ev, sw, le})
        if (sub->parsed()) cfg.subcommand = sub == le ? "losses eval" : sub->get_name();
    if (dump_config) log.raw(cfg.to_json());

    try {
        if (obj->parsed()) return run_objectness(cfg, log);
        if (pre->parsed()) return run_preprocess(cfg, log);
        if (syn->parsed()) return run_synth(cfg, out, log);
        if (ev->parsed()) return run_eval(cfg, out, log);
        if (sw->parsed()) return run_sweep(cfg, out, log);
        if (le->parsed()) return run_losses(cfg, out, log);
    } catch (const std::exception& e) {
        const int code = detail::exit_code_for(e);
        log.error(code, cfg.subcommand + ": " + e.what());
        return code;
    }
    return exit_usage;
}

} // namespace seedobj::cli
