#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gdl/config.hpp"
#include "gdl/model_io.hpp"

using namespace gdl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gdl_cli_" + std::to_string(reinterpret_cast<uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

const std::string kValidConfig =
    "[arch]\n"
    "layers = 3\n"
    "subbands = 8\n"
    "stride = 2\n"
    "filter_size = 7\n"
    "mog_order = 2\n"
    "adaptive = true\n"
    "tied = alpha,psi\n"
    "\n"
    "[train]\n"
    "sigma_lo = 20\n"
    "sigma_hi = 30\n"
    "batch = 4\n"
    "crop = 32\n"
    "steps = 100\n"
    "seed = 9\n"
    "val_every = 25\n"
    "lr_gabor = 0.002\n"
    "lr_thresh = 0.0002\n"
    "lr_min = 1e-06\n"
    "clip_norm = 50\n"
    "\n"
    "[data]\n"
    "train_manifest = lists/train.txt\n"
    "val_manifest = lists/val.txt\n"
    "\n"
    "[out]\n"
    "dir = runs/x\n"
    "name = x\n";

// run the command under a shell, returning the process exit code
int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -2;
}

}  // namespace

TEST_CASE("parse_config_text reads every field") {
    RunConfig cfg = parse_config_text(kValidConfig, "mem");
    CHECK(cfg.arch.layers == 3);
    CHECK(cfg.arch.subbands == 8);
    CHECK(cfg.arch.stride == 2);
    CHECK(cfg.arch.filter_size == 7);
    CHECK(cfg.arch.mog_order == 2);
    CHECK(cfg.arch.adaptive == true);
    CHECK(cfg.arch.tied.alpha);
    CHECK(cfg.arch.tied.psi);
    CHECK_FALSE(cfg.arch.tied.scale);
    CHECK_FALSE(cfg.arch.tied.thresholds);
    CHECK(cfg.train.sigma_lo == 20.0);
    CHECK(cfg.train.sigma_hi == 30.0);
    CHECK(cfg.train.batch == 4);
    CHECK(cfg.train.crop == 32);
    CHECK(cfg.train.steps == 100);
    CHECK(cfg.train.seed == 9);
    CHECK(cfg.train.val_every == 25);
    CHECK(cfg.train.lr_gabor == 0.002);
    CHECK(cfg.train.lr_thresh == 0.0002);
    CHECK(cfg.train.clip_norm == 50.0);
    CHECK(cfg.data.train_manifest == "lists/train.txt");
    CHECK(cfg.out.dir == "runs/x");
    CHECK(cfg.out.name == "x");
}

TEST_CASE("config defaults apply when keys are omitted") {
    RunConfig cfg = parse_config_text(
        "[arch]\nlayers = 2\nsubbands = 4\nstride = 1\nfilter_size = 5\n", "mem");
    CHECK(cfg.arch.mog_order == 1);
    CHECK(cfg.arch.adaptive == false);
    CHECK(cfg.arch.tied == tie_none());
    CHECK(cfg.train.sigma_lo == 25.0);
    CHECK(cfg.train.batch == 8);
    CHECK(cfg.train.lr_gabor == 1e-3);
    CHECK(cfg.out.name == "model");
}

TEST_CASE("config rejections carry origin and line") {
    auto expect_throw_with = [&](const std::string& text, const std::string& needle) {
        try {
            parse_config_text(text, "cfg.ini");
            FAIL_CHECK("expected a parse failure for: ", needle);
        } catch (const std::exception& e) {
            const std::string msg = e.what();
            CHECK_MESSAGE(msg.find("cfg.ini:") != std::string::npos, "message was: ", msg);
            CHECK_MESSAGE(msg.find(needle) != std::string::npos, "message was: ", msg);
        }
    };
    const std::string arch4 = "[arch]\nlayers = 2\nsubbands = 4\nstride = ";
    expect_throw_with("[arch]\nlayers = 2\nbogus_key = 1\n", "bogus_key");
    expect_throw_with("[arch]\nlayers = 2\n[junk]\nx = 1\n", "junk");
    expect_throw_with("[arch]\nlayers = banana\n", "layers");
    expect_throw_with(arch4 + "3\nfilter_size = 5\n", "stride");
    expect_throw_with(arch4 + "2\nfilter_size = 4\n", "filter_size");
    expect_throw_with(arch4 + "2\nfilter_size = 5\n[train]\ncrop = 33\n", "crop");
    expect_throw_with(arch4 + "2\nfilter_size = 5\n[train]\nsigma_lo = -5\n", "sigma");
    expect_throw_with(arch4 + "2\nfilter_size = 5\n[train]\nsigma_lo = 30\nsigma_hi = 20\n",
                      "sigma");
    expect_throw_with("[train]\nbatch = 2\n", "arch");  // missing required section
    expect_throw_with("layers = 2\n", "section");       // key before any section

    // the reported line number points at the offending line
    try {
        parse_config_text("[arch]\nlayers = 2\nsubbands = oops\n", "cfg.ini");
        FAIL_CHECK("expected a failure");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("cfg.ini:3") != std::string::npos);
    }
}

TEST_CASE("format_config round trips through the parser") {
    RunConfig cfg = parse_config_text(kValidConfig, "mem");
    const std::string text = format_config(cfg);
    RunConfig back = parse_config_text(text, "mem2");
    CHECK(back == cfg);
    // fractional values survive exactly via shortest round-trip formatting
    cfg.train.sigma_lo = 0.1 + 0.2;  // 0.30000000000000004
    cfg.train.sigma_hi = 12.5;
    cfg.train.lr_gabor = 1e-3;
    RunConfig back2 = parse_config_text(format_config(cfg), "mem3");
    CHECK(back2 == cfg);
}

TEST_CASE("parse_tie / format_tie") {
    CHECK(parse_tie("none") == tie_none());
    CHECK(parse_tie("all") == tie_all());
    TieConfig t = parse_tie("alpha, thresholds");
    CHECK(t.alpha);
    CHECK(t.thresholds);
    CHECK_FALSE(t.scale);
    CHECK_FALSE(t.omega0);
    CHECK(parse_tie("a,omega0,psi,thresholds").scale);
    CHECK_THROWS(parse_tie("alpha,bogus"));
    CHECK(format_tie(tie_none()) == "none");
    CHECK(format_tie(tie_all()) == "all");
    CHECK(format_tie(t) == "alpha,thresholds");
    CHECK(parse_tie(format_tie(t)) == t);
}

TEST_CASE("parse_config_file resolves manifests against the config directory") {
    TempDir td;
    fs::create_directories(td.path / "conf");
    write_text(td.file("conf/run.ini"),
               "[arch]\nlayers = 2\nsubbands = 4\nstride = 1\nfilter_size = 5\n"
               "[data]\ntrain_manifest = ../lists/tr.txt\nval_manifest = /abs/val.txt\n");
    RunConfig cfg = parse_config_file(td.file("conf/run.ini"));
    CHECK(cfg.data.train_manifest == (td.path / "lists/tr.txt").lexically_normal().string());
    CHECK(cfg.data.val_manifest == "/abs/val.txt");
    CHECK_THROWS(parse_config_file(td.file("conf/none.ini")));
}

TEST_CASE("ModelFile round trip is bit exact") {
    TempDir td;
    ModelFile mf;
    mf.config = parse_config_text(kValidConfig, "mem");
    mf.prov.seed = 9;
    mf.prov.steps = 100;
    mf.prov.manifest_hash = "a430d84680aabd0b";
    mf.prov.best_step = 75;
    mf.prov.best_val_psnr = 27.126;
    mf.params = init_model(mf.config.arch, mf.config.train.seed);
    // adversarial payloads: subnormal, negative zero, huge, pi-ish
    mf.params.values[0] = 5e-324;
    mf.params.values[1] = -0.0;
    mf.params.values[2] = -1.7976931348623157e308;
    mf.params.values[3] = 3.141592653589793;

    save_model(mf, td.file("m.model"));
    ModelFile back = load_model(td.file("m.model"));
    CHECK(back.config == mf.config);
    CHECK(back.prov == mf.prov);
    REQUIRE(back.params.values.size() == mf.params.values.size());
    for (size_t i = 0; i < mf.params.values.size(); ++i)
        CHECK(std::bit_cast<uint64_t>(back.params.values[i]) ==
              std::bit_cast<uint64_t>(mf.params.values[i]));
    // a second save of the loaded model reproduces the file byte for byte
    save_model(back, td.file("m2.model"));
    CHECK(read_text(td.file("m.model")) == read_text(td.file("m2.model")));
}

TEST_CASE("load_model rejects corrupted files") {
    TempDir td;
    ModelFile mf;
    mf.config = parse_config_text(kValidConfig, "mem");
    mf.params = init_model(mf.config.arch, 1);
    save_model(mf, td.file("ok.model"));

    std::string bytes = read_text(td.file("ok.model"));
    write_text(td.file("magic.model"), "NOPE" + bytes.substr(4));
    CHECK_THROWS(load_model(td.file("magic.model")));

    write_text(td.file("trunc.model"), bytes.substr(0, bytes.size() - 9));
    CHECK_THROWS(load_model(td.file("trunc.model")));

    const size_t data_at = bytes.find("DATA ");
    REQUIRE(data_at != std::string::npos);
    std::string wrong = bytes.substr(0, data_at) + "DATA 7\n" + std::string(7 * 8, '\0');
    write_text(td.file("count.model"), wrong);
    CHECK_THROWS(load_model(td.file("count.model")));

    CHECK_THROWS(load_model(td.file("missing.model")));
}

TEST_CASE("fnv1a_file_hex matches published vectors") {
    TempDir td;
    write_text(td.file("empty"), "");
    CHECK(fnv1a_file_hex(td.file("empty")) == "cbf29ce484222325");
    write_text(td.file("hello"), "hello");
    CHECK(fnv1a_file_hex(td.file("hello")) == "a430d84680aabd0b");
    write_text(td.file("a"), "a");
    CHECK(fnv1a_file_hex(td.file("a")) == "af63dc4c8601ec8c");
    CHECK_THROWS(fnv1a_file_hex(td.file("missing")));
}

#ifdef GDLNET_BIN
TEST_CASE("command line: parameter counting and exit codes") {
    TempDir td;
    const std::string bin = GDLNET_BIN;
    const std::string cfg = std::string(GDLNET_SOURCE_DIR) + "/configs/gdlnet-s-mog1.ini";
    const std::string out = td.file("out.txt");
    CHECK(run(bin + " count-params --config " + cfg + " > " + out + " 2>&1") == 0);
    CHECK(read_text(out).find("total: 66924") != std::string::npos);

    const std::string cfg3 = std::string(GDLNET_SOURCE_DIR) + "/configs/gdlnet-s-mog3.ini";
    CHECK(run(bin + " count-params --config " + cfg3 + " > " + out + " 2>&1") == 0);
    CHECK(read_text(out).find("total: 190632") != std::string::npos);

    // load/validate failures exit 1
    CHECK(run(bin + " count-params --config /nonexistent.ini > /dev/null 2>&1") == 1);
    CHECK(run(bin + " denoise --model /nonexistent.model --input x --out y > /dev/null 2>&1") ==
          1);
    CHECK(run(bin + " --bogus-flag > /dev/null 2>&1") == 1);

    // a config that parses but fails validation also exits 1
    write_text(td.file("bad.ini"), "[arch]\nlayers = 2\nsubbands = 4\nstride = 3\nfilter_size = 5\n");
    CHECK(run(bin + " count-params --config " + td.file("bad.ini") + " > /dev/null 2>&1") == 1);
}
#endif
