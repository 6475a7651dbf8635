#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsmr/benchmark.hpp"
#include "fsmr/io.hpp"
#include "fsmr/metrics.hpp"
#include "fsmr/report.hpp"
#include "fsmr/resample.hpp"

namespace fsmr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct ResampleOptions {
    ResamplerConfig config;
    std::string method = "afsmr";
    std::string mesh;
    std::string image;
    std::vector<double> transform;
    bool about_center = false;
    int width = 0;
    int height = 0;
    std::string output;
    bool print_config = false;
};

struct BenchmarkOptions {
    ResamplerConfig config;
    std::string dataset;
    std::vector<std::string> sequences{"zoom15", "rot15", "rot30", "affine4"};
    std::vector<std::string> methods{"bilinear", "bicubic", "lanczos", "fsmr", "afsmr"};
    int crop = kDefaultCrop;
    std::string report = "report";
    int max_size = 0;
    bool print_config = false;
};

inline std::vector<std::string> method_names() {
    std::vector<std::string> names;
    for (Method m : kAllMethods) {
        names.emplace_back(method_name(m));
    }
    return names;
}

/// key = value lines; loadable again through --config.
inline std::string describe(const ResamplerConfig& c) {
    std::ostringstream s;
    s << std::setprecision(17);
    s << "method = \"" << method_name(c.method) << "\"\n"
      << "block = " << c.block << "\n"
      << "support = " << c.support << "\n"
      << "iterations = " << c.stopping.max_iterations << "\n"
      << "min-energy-reduction = " << c.stopping.min_energy_reduction << "\n"
      << "rho = " << c.weighting.rho << "\n"
      << "sigma = " << c.weighting.sigma << "\n"
      << "alpha = " << c.weighting.alpha << "\n"
      << "threads = " << c.threads << "\n";
    return s.str();
}

inline void add_model_flags(CLI::App& app, ResamplerConfig& c) {
    app.add_option("--block", c.block, "Output block edge in pixels")->capture_default_str();
    app.add_option("--support", c.support, "Support ring width around each block in pixels")->capture_default_str();
    app.add_option("--iterations", c.stopping.max_iterations, "Model-generation iterations per block")
        ->capture_default_str();
    app.add_option("--min-energy-reduction", c.stopping.min_energy_reduction,
                   "Stop once the selected energy reduction drops below this value")
        ->capture_default_str();
    app.add_option("--rho", c.weighting.rho, "Spatial weighting decay in ]0,1[")->capture_default_str();
    app.add_option("--sigma", c.weighting.sigma, "Spectral weighting decay in ]0,1[")->capture_default_str();
    app.add_option("--alpha", c.weighting.alpha, "Key-point weight factor in [0,1] (fsmr)")->capture_default_str();
    app.add_option("--threads", c.threads, "Worker threads for the block loop")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

inline int cmd_resample(ResampleOptions opt, std::ostream& out, std::ostream& err) {
    opt.config.method = parse_method(opt.method);
    opt.config.validate();
    if (opt.print_config) {
        out << describe(opt.config);
        return kExitOk;
    }
    err << "effective config:\n" << describe(opt.config);
    const auto kernel = kernel_of(opt.config.method);
    if (opt.mesh.empty() == opt.image.empty()) {
        err << "resample: give exactly one of --mesh or --image\n";
        return kExitUsage;
    }
    if (!opt.mesh.empty() && kernel) {
        err << "resample: kernel methods need --image and --transform\n";
        return kExitUsage;
    }
    if (!opt.image.empty() && opt.transform.size() != 4 && opt.transform.size() != 6) {
        err << "resample: --transform takes 4 (matrix) or 6 (matrix, translation) numbers\n";
        return kExitUsage;
    }

    Image result;
    std::size_t blocks = 0;
    double seconds = 0.0;
    if (!opt.mesh.empty()) {
        if (opt.width <= 0 || opt.height <= 0) {
            err << "resample: --mesh needs --width and --height\n";
            return kExitUsage;
        }
        const MeshSampleSet mesh = io::read_mesh_csv(opt.mesh, opt.width, opt.height);
        const auto t0 = std::chrono::steady_clock::now();
        result = resample_mesh(mesh, opt.width, opt.height, opt.config);
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        blocks = partition_blocks(opt.width, opt.height, opt.config.block, opt.config.support).size();
    } else {
        const Image source = io::read_image(opt.image);
        const auto& t = opt.transform;
        AffineTransform a = AffineTransform::linear(t[0], t[1], t[2], t[3]);
        if (t.size() == 6) {
            a.translation = {t[4], t[5]};
        }
        if (opt.about_center) {
            a = about_point(a, {0.5 * (source.width() - 1), 0.5 * (source.height() - 1)});
        }
        SequenceResult timing;
        result = warp_and_reconstruct(source, {0, 0}, a, {0, 0}, source.width(), source.height(), opt.config,
                                      timing);
        seconds = timing.reconstruction_seconds;
        blocks = timing.blocks;
    }
    io::write_image(result, opt.output);
    out << "blocks: " << blocks << "\n"
        << "mean block time: " << format_fixed(1e3 * seconds / static_cast<double>(blocks), 4) << " ms\n";
    return kExitOk;
}

inline std::vector<std::filesystem::path> dataset_images(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir)) {
        throw IoError("dataset directory " + dir.string() + " does not exist");
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (entry.is_regular_file() && (ext == ".pgm" || ext == ".pnm" || ext == ".png")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

/// Centre crop to at most `size` x `size`; 0 keeps the image.
inline Image center_crop(const Image& img, int size) {
    if (size <= 0 || (img.width() <= size && img.height() <= size)) {
        return img;
    }
    const int w = std::min(size, img.width());
    const int h = std::min(size, img.height());
    const int x0 = (img.width() - w) / 2;
    const int y0 = (img.height() - h) / 2;
    Image out(w, h);
    for (int n = 0; n < h; ++n) {
        for (int m = 0; m < w; ++m) {
            out.at(m, n) = img.at(x0 + m, y0 + n);
        }
    }
    return out;
}

inline void print_tables(const BenchmarkReport& report, std::ostream& out) {
    const auto table = mean_table(report);
    std::vector<std::string> sequences;
    for (const auto& [method, cells] : table) {
        for (const auto& [seq, c] : cells) {
            if (std::find(sequences.begin(), sequences.end(), seq) == sequences.end()) {
                sequences.push_back(seq);
            }
        }
    }
    auto print = [&](const char* title, auto value, int decimals) {
        out << title << '\n' << std::left << std::setw(20) << "method";
        for (const auto& s : sequences) {
            out << std::right << std::setw(12) << s;
        }
        out << '\n';
        for (const auto& [method, cells] : table) {
            out << std::left << std::setw(20) << method;
            for (const auto& s : sequences) {
                auto it = std::find_if(cells.begin(), cells.end(), [&](const auto& e) { return e.first == s; });
                out << std::right << std::setw(12) << (it == cells.end() ? "-" : format_fixed(value(it->second), decimals));
            }
            out << '\n';
        }
        out << '\n';
    };
    print("mean PSNR [dB]", [](const MeanCell& c) { return c.psnr_db; }, 2);
    print("mean SSIM", [](const MeanCell& c) { return c.ssim; }, 4);
    print("mean time per block [ms]", [](const MeanCell& c) { return c.block_ms; }, 3);
}

inline int cmd_benchmark(const BenchmarkOptions& opt, std::ostream& out, std::ostream& err) {
    opt.config.validate();
    std::vector<Method> methods;
    for (const auto& name : opt.methods) {
        methods.push_back(parse_method(name));
    }
    const auto sequences = expand_sequences(opt.sequences);
    if (opt.crop < 0) {
        throw InvalidArgument("crop must be non-negative");
    }
    if (opt.print_config) {
        out << describe(opt.config) << "crop = " << opt.crop << "\n";
        return kExitOk;
    }
    const auto files = dataset_images(opt.dataset);
    if (files.empty()) {
        err << "benchmark: no PGM/PNG images in " << opt.dataset << "\n";
        return kExitFailure;
    }

    BenchmarkReport report;
    auto& meta = report.metadata;
    meta["crop"] = opt.crop;
    meta["block"] = opt.config.block;
    meta["support"] = opt.config.support;
    meta["iterations"] = opt.config.stopping.max_iterations;
    meta["rho"] = opt.config.weighting.rho;
    meta["sigma"] = opt.config.weighting.sigma;
    meta["alpha"] = opt.config.weighting.alpha;
    meta["threads"] = opt.config.threads;
    meta["max_size"] = opt.max_size;
    meta["images"] = files.size();

    for (const auto& file : files) {
        const Image original = center_crop(io::read_image(file), opt.max_size).quantized();
        const std::string name = file.filename().string();
        for (const auto& seq : sequences) {
            for (Method m : methods) {
                ResamplerConfig cfg = opt.config;
                cfg.method = m;
                const SequenceResult r = run_sequence(original, seq, cfg);
                BenchmarkRecord rec{name,
                                    std::string(method_name(m)),
                                    seq.name,
                                    psnr(original, r.output, opt.crop),
                                    ssim(original, r.output, opt.crop),
                                    r.block_ms()};
                err << name << ' ' << seq.name << ' ' << rec.method << ": " << format_fixed(rec.psnr_db, 2)
                    << " dB, SSIM " << format_fixed(rec.ssim, 4) << ", " << format_fixed(rec.block_ms, 3)
                    << " ms/block\n";
                report.records.push_back(std::move(rec));
            }
        }
    }
    emit_report(report, opt.report);
    print_tables(report, out);
    out << "report: " << opt.report << ".csv, " << opt.report << ".json\n";
    return kExitOk;
}

/// Splices the entries of every --config file into the argument list as flags,
/// skipping keys that were also given on the command line.
inline std::vector<std::string> expand_config_files(const std::vector<std::string>& args) {
    std::vector<std::string> files;
    std::vector<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config" && i + 1 < args.size()) {
            files.push_back(args[i + 1]);
        } else if (a.rfind("--config=", 0) == 0) {
            files.push_back(a.substr(9));
        } else if (a.rfind("--", 0) == 0) {
            given.push_back(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
        }
    }
    if (files.empty()) {
        return args;
    }
    std::vector<std::string> injected;
    const CLI::ConfigTOML parser;
    for (const auto& file : files) {
        for (const auto& item : parser.from_file(file)) {
            if (!item.parents.empty() || item.name == "config" ||
                std::find(given.begin(), given.end(), item.name) != given.end()) {
                continue;
            }
            if (item.inputs.size() == 1) {
                injected.push_back("--" + item.name + "=" + item.inputs.front());
            } else {
                injected.push_back("--" + item.name);
                injected.insert(injected.end(), item.inputs.begin(), item.inputs.end());
            }
        }
    }
    // Right after the subcommand name, so the flags bind to it.
    const auto head = args.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(2, args.size()));
    std::vector<std::string> result(args.begin(), head);
    result.insert(result.end(), injected.begin(), injected.end());
    result.insert(result.end(), head, args.end());
    return result;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Frequency-selective mesh-to-grid resampling"};
    app.require_subcommand(1);

    ResampleOptions ropt;
    ropt.config.threads = default_thread_count();
    auto* resample = app.add_subcommand("resample", "Reconstruct a regular grid from a mesh or a warped image");
    resample->add_option("--config", "TOML-style key = value file; flags win over the file");
    add_model_flags(*resample, ropt.config);
    resample->add_option("--method", ropt.method, "Reconstruction method")
        ->check(CLI::IsMember(method_names()))
        ->capture_default_str();
    resample->add_option("--mesh", ropt.mesh, "Mesh CSV with header x,y,value");
    resample->add_option("--width", ropt.width, "Target grid width (with --mesh)");
    resample->add_option("--height", ropt.height, "Target grid height (with --mesh)");
    resample->add_option("--image", ropt.image, "Source image (PGM/PNG) warped by --transform");
    resample->add_option("--transform", ropt.transform, "t00,t01,t10,t11[,tx,ty]")->delimiter(',');
    resample->add_flag("--center", ropt.about_center, "Apply --transform about the image centre");
    resample->add_option("-o,--output", ropt.output, "Output image (.png or .pgm)");
    resample->add_flag("--print-config", ropt.print_config, "Print the effective configuration and exit");

    BenchmarkOptions bopt;
    bopt.config.threads = default_thread_count();
    auto* bench = app.add_subcommand("benchmark", "Run transform sequences over a dataset and report metrics");
    bench->add_option("--config", "TOML-style key = value file; flags win over the file");
    add_model_flags(*bench, bopt.config);
    bench->add_option("--dataset", bopt.dataset, "Directory of PGM/PNG images");
    bench->add_option("--sequences", bopt.sequences, "zoom15, affine4, rot<deg>, rotation-sweep")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--methods", bopt.methods, "Methods to compare")
        ->delimiter(',')
        ->check(CLI::IsMember(method_names()))
        ->capture_default_str();
    bench->add_option("--crop", bopt.crop, "Border excluded from PSNR/SSIM")->capture_default_str();
    bench->add_option("--report", bopt.report, "Report path prefix (.csv and .json are appended)")
        ->capture_default_str();
    bench->add_option("--max-size", bopt.max_size, "Centre-crop images to at most N x N (0 keeps them)")
        ->capture_default_str();
    bench->add_flag("--print-config", bopt.print_config, "Print the effective configuration and exit");

    try {
        std::vector<std::string> args = expand_config_files({argv, argv + argc});
        args.erase(args.begin());
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
        return kExitUsage;
    }

    try {
        if (resample->parsed()) {
            if (ropt.output.empty() && !ropt.print_config) {
                err << "resample: -o/--output is required\n";
                return kExitUsage;
            }
            return cmd_resample(ropt, out, err);
        }
        if (bopt.dataset.empty() && !bopt.print_config) {
            err << "benchmark: --dataset is required\n";
            return kExitUsage;
        }
        return cmd_benchmark(bopt, out, err);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace fsmr::cli
