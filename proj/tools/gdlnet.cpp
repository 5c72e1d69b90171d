// gdlnet: train / denoise / eval / dict-viz / gradcheck / count-params
// Exit codes: 0 success, 1 usage or config error, 2 runtime or numerical failure.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gdl/config.hpp"
#include "gdl/data.hpp"
#include "gdl/eval.hpp"
#include "gdl/gradcheck.hpp"
#include "gdl/image_io.hpp"
#include "gdl/model_io.hpp"
#include "gdl/net.hpp"
#include "gdl/train.hpp"

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kDefaultEvalSeed = 1234;

int fail_usage(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 1;
}

int fail_runtime(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 2;
}

std::vector<double> parse_sigma_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size() || v < 0.0)
            throw std::runtime_error("--sigmas: bad entry '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::runtime_error("--sigmas: empty list");
    return out;
}

int cmd_train(const std::string& config_path) {
    gdl::RunConfig cfg;
    gdl::Dataset train_set, val_set;
    std::string manifest_hash = "0";
    try {
        cfg = gdl::parse_config_file(config_path);
        if (cfg.data.train_manifest.empty())
            throw std::runtime_error(config_path +
                                     ": [data] train_manifest is required by train");
        train_set = gdl::load_manifest(cfg.data.train_manifest, "train");
        if (train_set.paths.empty())
            throw std::runtime_error(cfg.data.train_manifest + ": manifest lists no images");
        if (!cfg.data.val_manifest.empty())
            val_set = gdl::load_manifest(cfg.data.val_manifest, "val");
        manifest_hash = gdl::fnv1a_file_hex(cfg.data.train_manifest);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    try {
        fs::create_directories(cfg.out.dir);
        const std::string log_path = cfg.out.dir + "/" + cfg.out.name + ".log";
        std::ofstream log(log_path);
        if (!log) throw std::runtime_error(log_path + ": cannot open log for writing");
        std::cout << "model " << cfg.out.name << ": " << gdl::count_params(cfg.arch)
                  << " learnable parameters\n";

        gdl::TrainResult res = gdl::train(cfg, train_set, val_set, &log);

        gdl::ModelFile mf;
        mf.config = cfg;
        mf.prov.seed = cfg.train.seed;
        mf.prov.steps = cfg.train.steps;
        mf.prov.manifest_hash = manifest_hash;
        mf.prov.best_step = res.best_step;
        mf.prov.best_val_psnr = res.best_val_psnr;
        mf.params = res.best;
        const std::string model_path = cfg.out.dir + "/" + cfg.out.name + ".model";
        gdl::save_model(mf, model_path);

        std::cout << "final loss " << res.final_loss;
        if (res.best_step >= 0)
            std::cout << ", best val PSNR " << res.best_val_psnr << " dB at step "
                      << res.best_step;
        std::cout << "\nwrote " << model_path << "\nlog " << log_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail_runtime(e.what());
    }
}

int cmd_denoise(const std::string& model_path, const std::string& input_path,
                const std::string& out_path, double sigma, bool sigma_given,
                const std::string& clean_path) {
    gdl::ModelFile mf;
    gdl::Image noisy;
    gdl::Image clean;
    bool have_clean = false;
    try {
        mf = gdl::load_model(model_path);
        noisy = gdl::load_pgm(input_path);
        if (!clean_path.empty()) {
            clean = gdl::load_pgm(clean_path);
            have_clean = true;
        }
        if (mf.config.arch.adaptive && !sigma_given)
            throw std::runtime_error(
                "adaptive model: supply the noise level via --sigma (this tool ships no "
                "noise estimator)");
        if (sigma_given && sigma < 0.0) throw std::runtime_error("--sigma must be >= 0");
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    try {
        gdl::Image xhat = gdl::denoise(mf.params, noisy, sigma_given ? sigma : 0.0);
        gdl::save_pgm(xhat, out_path);
        std::cout << "wrote " << out_path << "\n";
        if (have_clean) {
            std::cout << "PSNR noisy " << gdl::psnr(clean, noisy) << " dB -> denoised "
                      << gdl::psnr(clean, xhat) << " dB\n";
        }
        return 0;
    } catch (const std::exception& e) {
        return fail_runtime(e.what());
    }
}

int cmd_eval(const std::string& model_path, const std::string& manifest_path,
             const std::string& sigmas_text, const std::string& out_path,
             uint64_t eval_seed) {
    gdl::EvalModel model;
    gdl::Dataset testset;
    std::vector<double> sigmas;
    try {
        gdl::ModelFile mf = gdl::load_model(model_path);
        model.params = mf.params;
        model.id = mf.config.out.name;
        model.sigma_train_lo = mf.config.train.sigma_lo;
        model.sigma_train_hi = mf.config.train.sigma_hi;
        testset = gdl::load_manifest(manifest_path, "test");
        if (testset.paths.empty())
            throw std::runtime_error(manifest_path + ": manifest lists no images");
        sigmas = parse_sigma_list(sigmas_text);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    try {
        const auto reports = gdl::sweep(model, testset, sigmas, eval_seed);
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
        gdl::write_csv(reports, out);
        for (const auto& rep : reports)
            std::cout << "sigma=" << rep.sigma_test << " mean_psnr=" << rep.mean_psnr
                      << " dB over " << rep.images.size() << " images (" << rep.wall_ms
                      << " ms)\n";
        std::cout << "wrote " << out_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail_runtime(e.what());
    }
}

int cmd_dictviz(const std::string& model_path, const std::string& out_path,
                const std::string& manifest_path, double sigma, uint64_t eval_seed) {
    gdl::ModelFile mf;
    gdl::Dataset ds;
    try {
        mf = gdl::load_model(model_path);
        if (!manifest_path.empty()) {
            ds = gdl::load_manifest(manifest_path, "viz");
            if (ds.paths.empty())
                throw std::runtime_error(manifest_path + ": manifest lists no images");
        }
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    try {
        gdl::RealizedFilterbank dict =
            gdl::realize_filterbank(gdl::bank_spec(mf.params, gdl::Bank::Dictionary, 0));
        std::vector<int> order(dict.subbands);
        for (int m = 0; m < dict.subbands; ++m) order[m] = m;
        if (!ds.paths.empty()) {
            const gdl::UsageProfile prof =
                gdl::usage_profile(mf.params, ds, sigma, eval_seed);
            order = prof.order;
            std::cout << "usage-ordered montage (top subband " << order.front()
                      << ", mean |code| " << prof.usage[order.front()] << ")\n";
        }
        gdl::export_montage(dict, order, out_path);
        std::cout << "wrote " << out_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail_runtime(e.what());
    }
}

int cmd_gradcheck(const std::string& config_path, uint64_t seed, int trials) {
    gdl::ArchConfig arch;
    try {
        arch = gdl::parse_config_file(config_path).arch;
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    gdl::GradCheckOptions opt;
    bool all_pass = true;
    static const char* kFam[6] = {"alpha", "a", "omega0", "psi", "tau0", "tau1"};
    try {
        for (int t = 0; t < trials; ++t) {
            const gdl::GradCheckReport rep = gdl::gradcheck(arch, seed + t, opt);
            all_pass = all_pass && rep.pass;
            std::cout << "seed " << (seed + t) << ": " << (rep.pass ? "pass" : "FAIL")
                      << ", " << rep.coords << " coordinates, worst score "
                      << rep.worst_score << " (tolerance " << opt.rel_tol << ")\n  worst per family:";
            for (int f = 0; f < 6; ++f)
                if (rep.family_worst[f] > 0.0 || f < 5)
                    std::cout << " " << kFam[f] << "=" << rep.family_worst[f];
            std::cout << "\n";
            if (rep.checked_ties) {
                std::cout << "  tied-gradient sum consistency: " << rep.tie_sum_err
                          << (rep.tie_sum_err <= 1e-10 ? " (pass)" : " (FAIL)") << "\n";
                all_pass = all_pass && rep.tie_sum_err <= 1e-10;
            }
        }
    } catch (const std::invalid_argument& e) {
        return fail_usage(e.what());
    } catch (const std::exception& e) {
        return fail_runtime(e.what());
    }
    std::cout << (all_pass ? "PASS" : "FAIL") << "\n";
    return all_pass ? 0 : 2;
}

int cmd_count(const std::string& config_path) {
    try {
        const gdl::RunConfig cfg = gdl::parse_config_file(config_path);
        const gdl::ParamLayout layout(cfg.arch);
        const size_t total = layout.total();
        const size_t gabor = layout.threshold_offset();
        std::cout << "gabor parameters: " << gabor << " (tied families counted once)\n"
                  << "thresholds: " << (total - gabor)
                  << (cfg.arch.adaptive ? " (tau0 + tau1)" : " (tau0)") << "\n"
                  << "total: " << total << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gdlnet: Gabor-parameterized unrolled dictionary-learning denoiser"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads,
                   "worker threads (execution is sequential in this build; the flag is "
                   "accepted for interface stability)")
        ->check(CLI::PositiveNumber);

    std::string config_path, model_path, input_path, out_path, clean_path, manifest_path;
    std::string sigmas_text = "15,25,50";
    double sigma = 0.0;
    uint64_t seed = 0;
    uint64_t eval_seed = kDefaultEvalSeed;
    int trials = 1;

    auto* train_cmd = app.add_subcommand("train", "train a model from a config file");
    train_cmd->add_option("--config", config_path, "run configuration")->required();

    auto* den_cmd = app.add_subcommand("denoise", "denoise one image with a trained model");
    den_cmd->add_option("--model", model_path, "model file")->required();
    den_cmd->add_option("--input", input_path, "noisy input PGM")->required();
    den_cmd->add_option("--out", out_path, "output PGM")->required();
    auto* sigma_opt = den_cmd->add_option("--sigma", sigma, "noise level, 0-255 scale");
    den_cmd->add_option("--clean", clean_path, "ground truth PGM for PSNR reporting");

    auto* eval_cmd = app.add_subcommand("eval", "PSNR sweep over noise levels");
    eval_cmd->add_option("--model", model_path, "model file")->required();
    eval_cmd->add_option("--manifest", manifest_path, "test manifest")->required();
    eval_cmd->add_option("--sigmas", sigmas_text, "comma-separated test noise levels");
    eval_cmd->add_option("--out", out_path, "output CSV")->required();
    eval_cmd->add_option("--eval-seed", eval_seed, "evaluation noise seed");

    auto* viz_cmd = app.add_subcommand("dict-viz", "export the dictionary filter montage");
    viz_cmd->add_option("--model", model_path, "model file")->required();
    viz_cmd->add_option("--out", out_path, "output PGM")->required();
    viz_cmd->add_option("--manifest", manifest_path,
                        "order filters by usage over these images");
    viz_cmd->add_option("--sigma", sigma, "noise level for the usage pass")->default_val(25.0);
    viz_cmd->add_option("--eval-seed", eval_seed, "evaluation noise seed");

    auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference gradient self-check");
    gc_cmd->add_option("--config", config_path, "config with a small architecture")
        ->required();
    gc_cmd->add_option("--seed", seed, "base seed");
    gc_cmd->add_option("--trials", trials, "number of seeds to check")
        ->check(CLI::PositiveNumber);

    auto* count_cmd = app.add_subcommand("count-params", "learnable parameter count");
    count_cmd->add_option("--config", config_path, "run configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (train_cmd->parsed()) return cmd_train(config_path);
    if (den_cmd->parsed())
        return cmd_denoise(model_path, input_path, out_path, sigma, sigma_opt->count() > 0,
                           clean_path);
    if (eval_cmd->parsed())
        return cmd_eval(model_path, manifest_path, sigmas_text, out_path, eval_seed);
    if (viz_cmd->parsed())
        return cmd_dictviz(model_path, out_path, manifest_path, sigma, eval_seed);
    if (gc_cmd->parsed()) return cmd_gradcheck(config_path, seed, trials);
    if (count_cmd->parsed()) return cmd_count(config_path);
    return 1;
}
