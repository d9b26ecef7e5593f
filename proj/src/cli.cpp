#include "intensim/cli.hpp"

#include "format.hpp"
#include "intensim/aux_indexes.hpp"
#include "intensim/error.hpp"
#include "intensim/image_io.hpp"
#include "intensim/random.hpp"
#include "intensim/sequence.hpp"
#include "intensim/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>

namespace intensim::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kFormatVersion = 1;

struct Settings {
    // shared
    std::string metrics = "all";
    std::string baseline = "ssim-windowed";
    std::string weighting_params;
    double c1 = 1e-4;
    double c2 = 9e-4;
    double lisi_c1 = 1e-4;
    double lisi_c2 = 1e-4;
    int window = 11;
    double window_sigma = 1.5;
    std::string ms_levels = "auto";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> formats;
    std::string out;
    std::string input_format;

    // compare
    std::string ref_path;
    std::string test_path;

    // sequence
    std::vector<std::string> frames;
    std::string grid;
    std::string labels;
    std::string mode = "adjacent";
    bool sequence_normalization = false;
    bool direc_normalized = false;

    // synth
    std::vector<std::string> refs;
    std::size_t size = 64;
    std::string ref_kind = "natural";
    std::size_t ref_count = 4;
    std::string levels = "0.5,0.6,0.7,0.8,0.9,0.95,0.99,1";
    std::string dists = "uniform,gaussian,rayleigh";
    std::string amplitudes = "0.1";
    std::string bands = "highest,lowest";
    double fraction = 0.35;
    double coverage = 0.5;
    std::size_t repeats = 10;
    std::size_t bins = 20;
};

struct ConfigError : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

std::vector<std::string> split(const std::string& text, char sep = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_number(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !std::isfinite(v)) throw ConfigError("invalid " + what + " '" + text + "'");
    return v;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split(text)) out.push_back(parse_number(item, what));
    if (out.empty()) throw ConfigError(what + " list is empty");
    return out;
}

// "gaussian.sigma=0.5,tanh.k=2,sigmoid.k=10,sigmoid.c=0.5"
void apply_weighting_params(const std::string& text, MetricConfig& config) {
    for (const auto& item : split(text)) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("weighting parameter '" + item + "' lacks '='");
        const std::string key = item.substr(0, eq);
        const double value = parse_number(item.substr(eq + 1), "weighting parameter");
        if (key == "gaussian.sigma") {
            config.gaussian.sigma = value;
        } else if (key == "tanh.k" || key == "tanh.slope") {
            config.tanh.slope = value;
        } else if (key == "sigmoid.k" || key == "sigmoid.slope") {
            config.sigmoid.slope = value;
        } else if (key == "sigmoid.c" || key == "sigmoid.center") {
            config.sigmoid.center = value;
        } else {
            throw ConfigError("unknown weighting parameter '" + key + "'");
        }
    }
}

std::uint64_t resolve_seed(const Settings& s) {
    if (s.seed) return *s.seed;
    if (const char* env = std::getenv("IQA_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::strlen(env)) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("IQA_SEED is not an unsigned integer: '") + env + "'");
    }
    return 0;
}

// Largest level count (<= 5) whose coarsest scale still holds the window.
int auto_levels(std::size_t min_side, const WindowSpec& window) {
    for (int levels = 5; levels >= 1; --levels) {
        if (ms_ssim_min_side(levels, window) <= min_side) return levels;
    }
    return 1;
}

MetricConfig build_config(const Settings& s, std::size_t min_side) {
    MetricConfig config;
    config.ssim = {s.c1, s.c2};
    config.lisi = {s.lisi_c1, s.lisi_c2};
    config.window = {s.window, s.window_sigma};
    if (s.ms_levels == "auto") {
        config.ms_levels = auto_levels(min_side, config.window);
    } else {
        const double v = parse_number(s.ms_levels, "ms-ssim levels");
        if (v != std::floor(v)) throw ConfigError("ms-ssim levels must be an integer");
        config.ms_levels = static_cast<int>(v);
    }
    apply_weighting_params(s.weighting_params, config);
    try {
        config.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return config;
}

std::vector<MetricId> resolve_metrics(const Settings& s) {
    try {
        return parse_metric_list(s.metrics);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

MetricId resolve_baseline(const Settings& s) {
    try {
        return parse_metric(s.baseline);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

Image load(const std::string& path, const Settings& s) {
    if (!fs::exists(path)) throw IoError("'" + path + "' does not exist");
    if (s.input_format.empty()) return load_image(path);
    ImageFormat format;
    try {
        format = parse_format(s.input_format);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return load_image(path, format);
}

nlohmann::json echo(const Settings& s, const MetricConfig& config, const std::vector<MetricId>& metrics,
                    std::uint64_t seed) {
    std::vector<std::string> names;
    for (MetricId id : metrics) names.emplace_back(to_string(id));
    return {{"format_version", kFormatVersion},
            {"metrics", names},
            {"baseline", s.baseline},
            {"seed", seed},
            {"rng", kRngAlgorithm},
            {"parameters", config.to_json()}};
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << content;
    if (!f) throw IoError("write to '" + path.string() + "' failed");
}

std::set<std::string> formats_or(const Settings& s, std::set<std::string> fallback) {
    if (s.formats.empty()) return fallback;
    std::set<std::string> out;
    for (const auto& f : s.formats) {
        for (const auto& item : split(f)) {
            if (item != "json" && item != "csv" && item != "svg") throw ConfigError("unknown format '" + item + "'");
            out.insert(item);
        }
    }
    return out;
}

int cmd_compare(const Settings& s, std::ostream& out) {
    const auto metrics = resolve_metrics(s);
    const MetricId baseline = resolve_baseline(s);
    const Image ref = load(s.ref_path, s);
    const Image test = load(s.test_path, s);
    require_same_shape(ref, test);
    const MetricConfig config = build_config(s, std::min(ref.width(), ref.height()));
    const auto formats = formats_or(s, {"json"});
    if (formats.size() != 1 || formats.count("svg")) throw ConfigError("compare supports exactly one of json or csv");
    const std::uint64_t seed = resolve_seed(s);

    const auto [x, y] = normalize_joint(ref, test);
    std::vector<MetricResult> results;
    for (MetricId id : metrics) {
        try {
            results.push_back(evaluate(id, x, y, config));
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    const double base_score = [&] {
        for (const auto& r : results) {
            if (r.metric == to_string(baseline)) return r.score;
        }
        return evaluate(baseline, x, y, config).score;
    }();
    const int d = direc(ref, test);

    std::string text;
    if (formats.count("json")) {
        nlohmann::json sens = nlohmann::json::object();
        for (const auto& r : results) {
            try {
                sens[r.metric] = sensi(base_score, r.score);
            } catch (const UndefinedSensitivity&) {
                sens[r.metric] = nullptr;
            }
        }
        nlohmann::json doc = {{"reference", s.ref_path},
                              {"test", s.test_path},
                              {"width", ref.width()},
                              {"height", ref.height()},
                              {"results", results},
                              {"direc", d},
                              {"direc_input", "raw"},
                              {"baseline", std::string(to_string(baseline))},
                              {"baseline_score", base_score},
                              {"sensi", sens},
                              {"config", echo(s, config, metrics, seed)}};
        text = doc.dump(2) + "\n";
    } else {
        text = "metric,score,sensi,direc\n";
        for (const auto& r : results) {
            std::string sv;
            try {
                sv = detail::format_double(sensi(base_score, r.score));
            } catch (const UndefinedSensitivity&) {
            }
            text += r.metric + "," + detail::format_double(r.score) + "," + sv + "," + std::to_string(d) + "\n";
        }
    }
    if (s.out.empty()) {
        out << text;
    } else {
        write_file(s.out, text);
    }
    return kOk;
}

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".txt" || ext == ".dat" || ext == ".f64" || ext == ".raw";
}

std::vector<std::string> expand_frames(const std::vector<std::string>& inputs) {
    if (inputs.size() == 1 && fs::is_directory(inputs.front())) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(inputs.front())) {
            if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end(), [](const std::string& a, const std::string& b) {
            return fs::path(a).filename().string() < fs::path(b).filename().string();
        });
        return files;
    }
    return inputs;
}

int cmd_sequence(const Settings& s, std::ostream& out) {
    const auto metrics = resolve_metrics(s);
    const auto paths = expand_frames(s.frames);
    if (paths.size() < 2) throw ConfigError("a sequence needs at least two frames");
    std::vector<Image> frames;
    for (const auto& p : paths) frames.push_back(load(p, s));
    for (const auto& f : frames) require_same_shape(frames.front(), f);

    std::optional<RegionGrid> grid;
    try {
        if (!s.grid.empty()) {
            grid = parse_grid(s.grid);
            if (!s.labels.empty()) grid->labels = split(s.labels);
            grid->validate();
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    std::size_t min_side = std::min(frames.front().width(), frames.front().height());
    if (grid) {
        min_side = std::min(frames.front().width() / grid->cols, frames.front().height() / grid->rows);
    }

    SequenceOptions options;
    options.config = build_config(s, min_side);
    options.sequence_normalization = s.sequence_normalization;
    options.direc_on_normalized = s.direc_normalized;
    CompareMode mode;
    try {
        mode = parse_compare_mode(s.mode);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    const auto formats = formats_or(s, {"csv", "json"});
    const std::uint64_t seed = resolve_seed(s);

    SequenceReport report;
    try {
        report = grid ? compare_sequence_regions(frames, *grid, metrics, mode, options)
                      : compare_sequence(frames, metrics, mode, options);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    report.metadata["frame_paths"] = paths;
    report.metadata["run"] = echo(s, options.config, metrics, seed);

    const fs::path dir = s.out.empty() ? fs::path(".") : fs::path(s.out);
    std::vector<std::string> written;
    for (const auto& f : formats) {
        const fs::path p = dir / ("sequence." + f);
        write_file(p, emit_report(report, parse_report_format(f)));
        written.push_back(p.string());
    }
    write_file(dir / "config.json", report.metadata["run"].dump(2) + "\n");
    written.push_back((dir / "config.json").string());
    out << nlohmann::json{{"frames", paths.size()}, {"regions", report.regions.size()}, {"written", written}}.dump(2)
        << "\n";
    return kOk;
}

std::vector<Image> synth_refs(const Settings& s, std::uint64_t seed, std::size_t default_count) {
    std::vector<Image> refs;
    if (!s.refs.empty()) {
        for (const auto& p : s.refs) {
            const Image raw = load(p, s);
            // A single image is normalized on its own range.
            const double lo = raw.min();
            const double hi = raw.max();
            if (!(hi > lo)) throw DegenerateInput("degenerate input: reference '" + p + "' is constant");
            std::vector<double> px(raw.size());
            for (std::size_t i = 0; i < raw.size(); ++i) px[i] = (raw[i] - lo) / (hi - lo);
            refs.emplace_back(raw.width(), raw.height(), std::move(px));
        }
        return refs;
    }
    if (s.size < 2) throw ConfigError("synthetic reference size must be at least 2");
    if (s.ref_kind != "natural" && s.ref_kind != "low-info") {
        throw ConfigError("unknown reference kind '" + s.ref_kind + "'");
    }
    for (std::size_t i = 0; i < default_count; ++i) {
        const std::uint64_t ref_seed = derive_seed(seed, 1000 + i);
        refs.push_back(s.ref_kind == "natural" ? synthetic_natural(s.size, s.size, ref_seed)
                                               : synthetic_reference(s.size, s.size, ref_seed));
    }
    return refs;
}

std::size_t min_side_of(const std::vector<Image>& refs) {
    std::size_t m = refs.front().width();
    for (const auto& r : refs) m = std::min({m, r.width(), r.height()});
    return m;
}

int cmd_curves(const Settings& s, std::ostream& out) {
    const auto metrics = resolve_metrics(s);
    const std::uint64_t seed = resolve_seed(s);
    const auto refs = synth_refs(s, seed, 1);
    if (refs.size() != 1) throw ConfigError("synth curves takes exactly one reference");
    const MetricConfig config = build_config(s, min_side_of(refs));
    const auto levels = parse_numbers(s.levels, "level");
    const auto formats = formats_or(s, {"csv", "json", "svg"});

    std::vector<CurvePoint> points;
    try {
        points = run_characteristic_curves(refs.front(), metrics, levels, seed, config, s.fraction);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    auto run = echo(s, config, metrics, seed);
    run["curves"] = {{"levels", levels}, {"fraction", s.fraction},
                     {"reference_kind", s.refs.empty() ? s.ref_kind : "file"}};
    const fs::path dir = s.out.empty() ? fs::path(".") : fs::path(s.out);
    if (formats.count("csv")) write_file(dir / "curves.csv", curves_to_csv(points));
    if (formats.count("svg")) write_file(dir / "curves.svg", curves_to_svg(points));
    if (formats.count("json")) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : points) {
            pts.push_back({{"level", p.level}, {"band", std::string(to_string(p.band))}, {"scores", p.scores}});
        }
        nlohmann::json doc = {{"config", run}, {"fraction", s.fraction}, {"points", pts}};
        write_file(dir / "curves.json", doc.dump(2) + "\n");
    }
    write_file(dir / "config.json", run.dump(2) + "\n");

    // Summary: score per level and band.
    out << "level    band     ";
    for (MetricId id : metrics) out << " " << to_string(id);
    out << "\n";
    for (const auto& p : points) {
        char head[48];
        std::snprintf(head, sizeof head, "%-8.4g %-8s", p.level, std::string(to_string(p.band)).c_str());
        out << head;
        for (MetricId id : metrics) {
            char cell[48];
            std::snprintf(cell, sizeof cell, " %.6f", p.scores.at(std::string(to_string(id))));
            out << cell;
        }
        out << "\n";
    }
    return kOk;
}

int cmd_noise(const Settings& s, std::ostream& out) {
    const auto metrics = resolve_metrics(s);
    const std::uint64_t seed = resolve_seed(s);
    const auto refs = synth_refs(s, seed, s.ref_count);
    const MetricConfig config = build_config(s, min_side_of(refs));
    if (s.repeats < 1) throw ConfigError("repeats must be at least 1");
    const auto formats = formats_or(s, {"csv", "json"});

    std::vector<NoiseSpec> specs;
    try {
        for (const auto& band : split(s.bands)) {
            for (const auto& dist : split(s.dists)) {
                for (double amp : parse_numbers(s.amplitudes, "amplitude")) {
                    NoiseSpec spec{parse_distribution(dist), amp, parse_band(band), s.fraction, 0, s.coverage};
                    spec.validate();
                    specs.push_back(spec);
                }
            }
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (specs.empty()) throw ConfigError("no noise specs configured");

    NoiseGroupOptions options;
    options.baseline = resolve_baseline(s);
    options.config = config;
    options.bins = s.bins;
    NoiseGroupReport report;
    try {
        report = run_noise_groups(refs, specs, metrics, s.repeats, seed, options);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }

    auto run = echo(s, config, metrics, seed);
    run["noise"] = {{"distributions", split(s.dists)},   {"amplitudes", parse_numbers(s.amplitudes, "amplitude")},
                    {"bands", split(s.bands)},           {"fraction", s.fraction},
                    {"coverage", s.coverage},            {"repeats", s.repeats},
                    {"references", refs.size()},         {"synthetic_size", s.refs.empty() ? s.size : 0},
                    {"reference_kind", s.refs.empty() ? s.ref_kind : "file"},
                    {"bins", s.bins}};
    const fs::path dir = s.out.empty() ? fs::path(".") : fs::path(s.out);
    if (formats.count("csv")) write_file(dir / "noise.csv", noise_rows_to_csv(report));
    if (formats.count("json")) {
        auto hist = noise_histograms_to_json(report);
        hist["config"] = run;
        write_file(dir / "noise_histograms.json", hist.dump(2) + "\n");
    }
    write_file(dir / "config.json", run.dump(2) + "\n");
    out << noise_summary_table(report);
    return kOk;
}

void add_shared(CLI::App& app, Settings& s) {
    app.add_option("--metrics", s.metrics, "Comma-separated metric ids or 'all'")->capture_default_str();
    app.add_option("--baseline", s.baseline, "Baseline metric for sensi")->capture_default_str();
    app.add_option("--weighting-params", s.weighting_params,
                   "e.g. gaussian.sigma=0.5,tanh.k=2,sigmoid.k=10,sigmoid.c=0.5");
    app.add_option("--c1", s.c1, "SSIM C1")->capture_default_str();
    app.add_option("--c2", s.c2, "SSIM C2")->capture_default_str();
    app.add_option("--lisi-c1", s.lisi_c1, "LISI C1 (D = C1/2)")->capture_default_str();
    app.add_option("--lisi-c2", s.lisi_c2, "LISI C2")->capture_default_str();
    app.add_option("--window", s.window, "Gaussian window size (odd)")->capture_default_str();
    app.add_option("--window-sigma", s.window_sigma, "Gaussian window sigma")->capture_default_str();
    app.add_option("--ms-levels", s.ms_levels, "MS-SSIM levels (1-5 or auto)")->capture_default_str();
    app.add_option("--seed", s.seed, "Random seed (falls back to IQA_SEED, then 0)");
    app.add_option("--format", s.formats, "Output format(s): json, csv, svg");
    app.add_option("--out", s.out, "Output file (compare) or directory");
    app.add_option("--input-format", s.input_format, "Force input format: png8, png16, text, raw-f64");
}

void print_error(std::ostream& err, std::string_view kind, std::string_view message) {
    err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Settings s;
    CLI::App app{"Intensity-sensitive image similarity indexes", "intensim"};
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();
    add_shared(app, s);

    auto* compare = app.add_subcommand("compare", "Score a test image against a reference");
    compare->add_option("reference", s.ref_path)->required();
    compare->add_option("test", s.test_path)->required();

    auto* sequence = app.add_subcommand("sequence", "Analyse a time-ordered image sequence");
    sequence->add_option("frames", s.frames, "Frame files in order, or one directory (sorted by filename)")
        ->required();
    sequence->add_option("--grid", s.grid, "Region grid RxC");
    sequence->add_option("--labels", s.labels, "Comma-separated row-major cell labels");
    sequence->add_option("--mode", s.mode, "adjacent or first-vs-each")->capture_default_str();
    sequence->add_flag("--sequence-normalization", s.sequence_normalization,
                       "Normalize with the range of the whole sequence");
    sequence->add_flag("--direc-normalized", s.direc_normalized, "Compute direc on normalized values");

    auto* synth = app.add_subcommand("synth", "Synthetic experiments");
    synth->require_subcommand(1);
    auto* curves = synth->add_subcommand("curves", "Characteristic curves for high and low intensity bands");
    auto* noise = synth->add_subcommand("noise", "Intensity-band noise groups and sensi histograms");
    for (auto* sub : {curves, noise}) {
        sub->add_option("--ref", s.refs, "Reference image(s); synthetic references when omitted");
        sub->add_option("--size", s.size, "Side of synthetic references")->capture_default_str();
        sub->add_option("--ref-kind", s.ref_kind, "Synthetic reference kind: natural or low-info")
            ->capture_default_str();
        sub->add_option("--fraction", s.fraction, "Intensity band fraction")->capture_default_str();
    }
    curves->add_option("--levels", s.levels, "Comma-separated similarity levels in (0, 1]")->capture_default_str();
    noise->add_option("--refs", s.ref_count, "Number of synthetic references")->capture_default_str();
    noise->add_option("--dist", s.dists, "Noise distributions")->capture_default_str();
    noise->add_option("--amplitude", s.amplitudes, "Noise amplitudes")->capture_default_str();
    noise->add_option("--band", s.bands, "Bands: highest, lowest")->capture_default_str();
    noise->add_option("--coverage", s.coverage, "Share of band pixels receiving noise")->capture_default_str();
    noise->add_option("--repeats", s.repeats, "Noisy images per reference and spec")->capture_default_str();
    noise->add_option("--bins", s.bins, "Histogram bins")->capture_default_str();

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("intensim");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        print_error(err, "config", e.what());
        return kConfigError;
    }

    try {
        if (compare->parsed()) return cmd_compare(s, out);
        if (sequence->parsed()) return cmd_sequence(s, out);
        if (curves->parsed()) return cmd_curves(s, out);
        if (noise->parsed()) return cmd_noise(s, out);
        print_error(err, "config", "no command given");
        return kConfigError;
    } catch (const IoError& e) {
        print_error(err, "io", e.what());
        return kIoError;
    } catch (const DimensionMismatch& e) {
        print_error(err, "dimension-mismatch", e.what());
        return kDimensionMismatch;
    } catch (const DegenerateInput& e) {
        print_error(err, "degenerate-input", e.what());
        return kDegenerateInput;
    } catch (const InvalidArgument& e) {
        print_error(err, "config", e.what());
        return kConfigError;
    } catch (const fs::filesystem_error& e) {
        print_error(err, "io", e.what());
        return kIoError;
    } catch (const std::exception& e) {
        print_error(err, "internal", e.what());
        return kInternalError;
    }
}

}  // namespace intensim::cli
