#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef GCLM_PATH
#error "GCLM_PATH must name the gclm executable"
#endif

namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path root;
    Workspace() {
        root = fs::temp_directory_path() / ("gclm_test_" + std::to_string(::getpid()));
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~Workspace() { fs::remove_all(root); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(GCLM_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string toy_matrix() {
    std::string text = "id";
    for (int j = 0; j < 12; ++j) text += "\ts" + std::to_string(j);
    text += "\n";
    const char* rows[] = {"skewed\t0.1\t0.2\t0.15\t0.3\t0.25\t0.2\t0.1\t0.4\t3.5\t0.3\t0.2\t0.1\n",
                          "flat\t2\t2\t2\t2\t2\t2\t2\t2\t2\t2\t2\t2\n",
                          "mixed\t-1\t0.5\t1.2\t-0.3\t0.8\t-2.1\t0.4\t1.1\t-0.6\t0.2\t0.9\t-1.4\n"};
    for (const char* r : rows) text += r;
    return text;
}

}  // namespace

TEST_CASE("stats on a toy matrix") {
    Workspace ws;
    write(ws.root / "m.tsv", toy_matrix());
    const auto out = ws.root / "out";
    REQUIRE(run("stats --input " + (ws.root / "m.tsv").string() + " --out-dir " + out.string()) == 0);
    const auto summary = slurp(out / "summary.tsv");
    CHECK(summary.rfind("variable_id\tn\tstatus", 0) == 0);
    CHECK(summary.find("skewed\t12\tOK") != std::string::npos);
    CHECK(summary.find("flat\t12\tEXCLUDED") != std::string::npos);
    CHECK(summary.find("mixed\t12\tOK") != std::string::npos);
    CHECK(fs::exists(out / "run_config.json"));

    const auto again = ws.root / "again";
    REQUIRE(run("stats --input " + (ws.root / "m.tsv").string() + " --out-dir " + again.string()) == 0);
    CHECK(slurp(again / "summary.tsv") == summary);
}

TEST_CASE("screen writes the selection") {
    Workspace ws;
    write(ws.root / "m.tsv", toy_matrix());
    const auto out = ws.root / "out";
    REQUIRE(run("screen --input " + (ws.root / "m.tsv").string() + " --stat l_skewness --k 1 --direction descending" +
                " --out-dir " + out.string()) == 0);
    const auto selection = slurp(out / "selection_l_skewness.tsv");
    CHECK(selection == "rank\tvariable_id\tmetric\n" + selection.substr(selection.find('\n') + 1));
    CHECK(selection.find("\tskewed\t") != std::string::npos);
    CHECK(fs::exists(out / "ranked_l_skewness.json"));
    CHECK(fs::exists(out / "plot_data_l_skewness.json"));
}

TEST_CASE("exit codes") {
    Workspace ws;
    write(ws.root / "m.tsv", toy_matrix());
    const auto input = " --input " + (ws.root / "m.tsv").string() + " --out-dir " + (ws.root / "out").string();
    CHECK(run("--help") == 0);
    CHECK(run("") == 2);
    CHECK(run("screen --stat not_a_statistic" + input) == 2);
    CHECK(run("robustness --h= --out-dir " + (ws.root / "out").string()) == 2);
    CHECK(run("stats --input " + (ws.root / "missing.tsv").string()) == 1);
    write(ws.root / "dup.tsv", "id\ta\tb\ng\t1\t2\ng\t3\t4\n");
    CHECK(run("stats --input " + (ws.root / "dup.tsv").string() + " --out-dir " + (ws.root / "out").string()) == 1);
    CHECK(run("gsea --stat l_skewness" + input) == 2);
}

TEST_CASE("simulate then gsea on a precomputed ranking") {
    Workspace ws;
    const auto sim = ws.root / "sim";
    REQUIRE(run("simulate --seed 4 --variables 120 --samples 60 --out-dir " + sim.string()) == 0);
    const auto matrix = slurp(sim / "matrix.tsv");
    CHECK(matrix.rfind("id\ts001\t", 0) == 0);
    CHECK(slurp(sim / "sets.gmt").rfind("PLANTED\t", 0) == 0);

    const auto scr = ws.root / "screen";
    REQUIRE(run("screen --input " + (sim / "matrix.tsv").string() + " --stat l_skewness --direction descending" +
                " --bias-replicates 200 --out-dir " + scr.string()) == 0);
    const auto gs = ws.root / "gsea";
    REQUIRE(run("gsea --ranked " + (scr / "ranked_l_skewness.tsv").string() + " --gmt " + (sim / "sets.gmt").string() +
                " --stat l_skewness --permutations 100 --min-size 5 --out-dir " + gs.string()) == 0);
    const auto tsv = slurp(gs / "enrichment_l_skewness.tsv");
    CHECK(tsv.find("\nPLANTED\t") != std::string::npos);
    CHECK(fs::exists(gs / "profiles_l_skewness.json"));
}
