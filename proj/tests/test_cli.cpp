#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli_app.hpp"
#include "fba/image_io.hpp"
#include "fba/shake.hpp"
#include "fba/warp.hpp"
#include "test_support.hpp"

using namespace fba;
namespace fs = std::filesystem;

namespace {

std::string cli_path() { return FBA_CLI_PATH; }

int run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string run_capture(const std::string& args) {
    const std::string out = test::temp_dir() + "/cli_stdout.txt";
    const std::string cmd = cli_path() + " " + args + " >" + out + " 2>&1";
    std::system(cmd.c_str());
    std::ifstream f(out);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// a small registered synthetic burst written as PFM frames
std::string make_burst_dir(const std::string& name, int frames,
                           std::uint64_t seed, double noise = 0.01) {
    const std::string dir = test::temp_dir() + "/" + name;
    fs::create_directories(dir);
    const PlanarImage truth = synthetic_scene(96, 96, seed);
    TremorParams tremor;
    std::vector<BlurKernel> kernels;
    for (int i = 0; i < frames; ++i) {
        Rng rng(seed, 0x636c69, i, 0);
        kernels.push_back(simulate_kernel(tremor, rng));
    }
    const auto burst = synthesize_burst(truth, kernels, noise, seed);
    for (std::size_t i = 0; i < burst.size(); ++i) {
        char file[64];
        std::snprintf(file, sizeof(file), "/frame_%02zu.pfm", i);
        write_image(burst[i], dir + file);
    }
    write_image(truth, dir + "_truth.pfm");
    return dir;
}

}  // namespace

TEST_CASE("missing input files exit with code 2 and name the path") {
    const std::string missing = test::temp_dir() + "/nope_missing.png";
    const std::string out = run_capture("deblur " + missing + " -o " +
                                        test::temp_dir() + "/x.png");
    CHECK(run("deblur " + missing + " -o " + test::temp_dir() + "/x.png") == 2);
    CHECK(out.find(missing) != std::string::npos);
}

TEST_CASE("unknown flags and methods are usage errors") {
    CHECK(run("deblur --definitely-not-a-flag") == 2);
    const std::string dir = make_burst_dir("cli_usage", 2, 1);
    CHECK(run("baseline " + dir + " -o " + test::temp_dir() +
              "/b.png --method nope --no-register") == 2);
}

TEST_CASE("single frame with sharpening disabled passes through") {
    const std::string dir = test::temp_dir() + "/cli_single";
    fs::create_directories(dir);
    const PlanarImage scene = synthetic_scene(96, 96, 77);
    write_image(scene, dir + "/only.pfm");

    const std::string out = test::temp_dir() + "/single_out.pfm";
    REQUIRE(run("deblur " + dir + "/only.pfm --no-sharpen -o " + out) == 0);
    const PlanarImage result = read_image(out);
    CHECK(max_abs_diff(result, scene) < 1e-6);
}

TEST_CASE("deblur beats the plain average on a synthetic burst") {
    const std::string dir = make_burst_dir("cli_burst", 6, 5, 0.02);
    const PlanarImage truth = read_image(dir + "_truth.pfm");

    const std::string merged = test::temp_dir() + "/merged.pfm";
    const std::string averaged = test::temp_dir() + "/averaged.pfm";
    REQUIRE(run("deblur " + dir + " --no-register --no-sharpen -o " + merged) == 0);
    REQUIRE(run("baseline " + dir + " --no-register --method average -o " +
                averaged) == 0);
    CHECK(rmse(read_image(merged), truth) < rmse(read_image(averaged), truth));
}

TEST_CASE("baseline average equals deblur at p=0") {
    const std::string dir = make_burst_dir("cli_p0", 4, 9);
    const std::string a = test::temp_dir() + "/p0_deblur.pfm";
    const std::string b = test::temp_dir() + "/p0_baseline.pfm";
    REQUIRE(run("deblur " + dir + " --no-register --no-sharpen --p 0 -o " + a) == 0);
    REQUIRE(run("baseline " + dir + " --no-register --method average -o " + b) == 0);
    CHECK(max_abs_diff(read_image(a), read_image(b)) < 1e-6);
}

TEST_CASE("baseline equivalences: lfa with k=M and freq-pct with fraction 1") {
    const std::string dir = make_burst_dir("cli_equiv", 3, 13);
    const std::string avg = test::temp_dir() + "/eq_avg.pfm";
    const std::string lfa = test::temp_dir() + "/eq_lfa.pfm";
    const std::string pct = test::temp_dir() + "/eq_pct.pfm";
    REQUIRE(run("baseline " + dir + " --no-register --method average -o " + avg) == 0);
    REQUIRE(run("baseline " + dir + " --no-register --method lfa --k 3 -o " + lfa) == 0);
    REQUIRE(run("baseline " + dir +
                " --no-register --method freq-pct --fraction 1 -o " + pct) == 0);
    CHECK(max_abs_diff(read_image(avg), read_image(lfa)) < 1e-6);
    CHECK(max_abs_diff(read_image(avg), read_image(pct)) < 1e-6);
}

TEST_CASE("contribution dumps sum to the unsharpened output") {
    const std::string dir = make_burst_dir("cli_contrib", 3, 21);
    const std::string out = test::temp_dir() + "/contrib_out.pfm";
    const std::string dump = test::temp_dir() + "/contrib_dump";
    REQUIRE(run("deblur " + dir + " --no-register --no-sharpen -o " + out +
                " --dump-contributions " + dump) == 0);

    const PlanarImage merged = read_image(out);
    PlanarImage total(merged.width, merged.height, merged.channels);
    for (int i = 1; i <= 3; ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "/contribution_%03d.pfm", i);
        const PlanarImage c = read_image(dump + name);
        for (int ch = 0; ch < total.channels; ++ch)
            for (std::size_t px = 0; px < total.planes[ch].size(); ++px)
                total.planes[ch][px] += c.planes[ch][px];
    }
    CHECK(max_abs_diff(total, merged) < 1e-6);
}

TEST_CASE("weight dumps are 16-bit heatmaps, one per frame") {
    const std::string dir = make_burst_dir("cli_weights", 3, 23);
    const std::string out = test::temp_dir() + "/w_out.pfm";
    const std::string dump = test::temp_dir() + "/w_dump";
    REQUIRE(run("deblur " + dir + " --no-register --no-sharpen -o " + out +
                " --dump-weights " + dump) == 0);
    for (int i = 1; i <= 3; ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "/weights_%03d.png", i);
        const PlanarImage w = read_image(dump + name);
        CHECK(w.channels == 1);
        CHECK(w.width == 96);
    }
}

TEST_CASE("simulate is deterministic and honors the schema") {
    const std::string csv_a = test::temp_dir() + "/sim_a.csv";
    const std::string csv_b = test::temp_dir() + "/sim_b.csv";
    const std::string flags =
        " simulate --trials 4 --frames 3 --size 48 --noise 0.02 --p 0 --p 7 "
        "--seed 11 --out ";
    REQUIRE(run(flags + csv_a) == 0);
    REQUIRE(run(flags + csv_b) == 0);
    const std::string bytes = file_bytes(csv_a);
    CHECK(bytes == file_bytes(csv_b));
    CHECK(bytes.rfind("p,epsilon,T_exp,M,s,trials,mse,bias2,variance\n", 0) == 0);
}

TEST_CASE("simulate with no degradation reports near-zero error") {
    const std::string csv = test::temp_dir() + "/sim_zero.csv";
    REQUIRE(run("simulate --trials 2 --frames 2 --size 32 --noise 0 --texp 1e-9 "
                "--p 0 --out " +
                csv) == 0);
    std::ifstream f(csv);
    std::string header, row;
    std::getline(f, header);
    std::getline(f, row);
    // mse is the 7th column
    std::stringstream ss(row);
    std::string cell;
    for (int i = 0; i < 7; ++i) std::getline(ss, cell, ',');
    CHECK(std::abs(std::stod(cell)) < 1e-9);
}

TEST_CASE("psf reports higher concentration at p=11 than p=0") {
    const std::string text =
        run_capture("psf --simulate 8 --seed 3 --p 0 --p 11");
    double c0 = -1.0, c11 = -1.0;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        double p, c, m;
        if (std::sscanf(line.c_str(), "p=%lf concentration=%lf mass=%lf", &p, &c,
                        &m) == 3) {
            if (p == 0.0) c0 = c;
            if (p == 11.0) c11 = c;
            CHECK(m == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    REQUIRE(c0 >= 0.0);
    REQUIRE(c11 >= 0.0);
    CHECK(c11 > c0);
}

TEST_CASE("psf of a single Dirac kernel is a Dirac") {
    const std::string dir = test::temp_dir() + "/cli_psf";
    fs::create_directories(dir);
    PlanarImage k(41, 41, 1);
    k.at(0, 20, 20) = 1.0;
    write_image(k, dir + "/dirac.pfm");
    const std::string out_dir = dir + "/out";
    REQUIRE(run("psf " + dir + "/dirac.pfm --p 11 --out-dir " + out_dir) == 0);
    const PlanarImage psf = read_image(out_dir + "/psf_p11.pfm");
    CHECK(psf.at(0, 20, 20) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("multi-burst outputs match independent runs and tolerate failures") {
    const std::string dir_a = make_burst_dir("cli_multi_a", 3, 31);
    const std::string dir_b = make_burst_dir("cli_multi_b", 3, 31);
    const std::string out_dir = test::temp_dir() + "/multi_out";

    REQUIRE(run("multi-burst " + dir_a + " " + dir_b + " --no-register "
                "--no-sharpen --out-dir " +
                out_dir) == 0);
    // identical input bursts give identical outputs
    CHECK(file_bytes(out_dir + "/cli_multi_a.png") ==
          file_bytes(out_dir + "/cli_multi_b.png"));

    // each output equals a standalone deblur with the same flags
    const std::string solo = test::temp_dir() + "/multi_solo.png";
    REQUIRE(run("deblur " + dir_a + " --no-register --no-sharpen -o " + solo) == 0);
    CHECK(file_bytes(solo) == file_bytes(out_dir + "/cli_multi_a.png"));

    // a broken burst directory fails that burst but not the rest
    const std::string broken = test::temp_dir() + "/cli_multi_broken";
    fs::create_directories(broken);
    const std::string out2 = test::temp_dir() + "/multi_out2";
    CHECK(run("multi-burst " + dir_a + " " + broken + " --no-register "
              "--no-sharpen --out-dir " +
              out2) == 1);
    CHECK(fs::exists(out2 + "/cli_multi_a.png"));

    // fewer than two bursts is a usage error
    CHECK(run("multi-burst " + dir_a + " --out-dir " + out_dir) == 2);
}

TEST_CASE("registration failure exits with code 1") {
    const std::string dir = test::temp_dir() + "/cli_blank";
    fs::create_directories(dir);
    const PlanarImage blank = test::constant_image(64, 64, 1, 0.5);
    write_image(blank, dir + "/a.pfm");
    write_image(blank, dir + "/b.pfm");
    CHECK(run("deblur " + dir + " -o " + test::temp_dir() + "/blank_out.png") == 1);
}

TEST_CASE("config file values are overridden by flags") {
    const std::string dir = make_burst_dir("cli_config", 2, 41);
    const std::string conf = test::temp_dir() + "/fba.conf";
    {
        std::ofstream f(conf);
        f << "seed=9\n[deblur]\np=0\n";
    }
    const std::string from_conf = test::temp_dir() + "/conf_a.pfm";
    const std::string overridden = test::temp_dir() + "/conf_b.pfm";
    const std::string direct = test::temp_dir() + "/conf_c.pfm";
    REQUIRE(run("--config " + conf + " deblur " + dir +
                " --no-register --no-sharpen -o " + from_conf) == 0);
    REQUIRE(run("--config " + conf + " deblur " + dir +
                " --no-register --no-sharpen --p 11 -o " + overridden) == 0);
    REQUIRE(run("deblur " + dir + " --no-register --no-sharpen --p 11 -o " +
                direct) == 0);
    CHECK(file_bytes(overridden) == file_bytes(direct));
    CHECK(file_bytes(from_conf) != file_bytes(overridden));
}

TEST_CASE("help text and parsed flags agree") {
    cli::CliOptions opts;
    auto app = cli::build_cli(opts);

    std::vector<CLI::App*> apps = {app.get()};
    for (auto* sub : app->get_subcommands({})) apps.push_back(sub);

    for (CLI::App* a : apps) {
        const std::string help = a->help();
        std::set<std::string> documented;
        std::stringstream ss(help);
        std::string token;
        while (ss >> token) {
            // a token may bundle names: "-o,--output"
            std::stringstream parts(token);
            std::string part;
            while (std::getline(parts, part, ',')) {
                while (!part.empty() && (part.back() == ']' || part.back() == ','))
                    part.pop_back();
                if (part.rfind("--", 0) == 0) documented.insert(part);
            }
        }
        // every registered option is documented ...
        for (const CLI::Option* opt : a->get_options()) {
            for (const std::string& name : opt->get_lnames())
                CHECK(documented.count("--" + name) == 1);
        }
        // ... and every documented flag is parseable
        for (const std::string& name : documented) {
            CHECK(a->get_option_no_throw(name) != nullptr);
        }
    }
}
