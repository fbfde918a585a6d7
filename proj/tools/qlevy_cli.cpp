// Command-line front end. Links only the C API in qlevy.h.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qlevy.h"

namespace {

std::string fmt(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

struct ModelDeleter {
    void operator()(qlevy_model* m) const { qlevy_model_free(m); }
};
using ModelPtr = std::unique_ptr<qlevy_model, ModelDeleter>;

[[noreturn]] void die(const std::string& what, qlevy_status status) {
    std::cerr << "error: " << what << ": " << qlevy_status_string(status) << "\n";
    std::exit(1);
}

ModelPtr make_model(const std::string& eta, int k) {
    qlevy_model* raw = nullptr;
    const qlevy_status st = qlevy_model_parse(eta.c_str(), k, &raw);
    if (st != QLEVY_OK) die("spectrum '" + eta + "'", st);
    return ModelPtr(raw);
}

int parse_algo(const std::string& algo) {
    if (algo == "1" || algo == "alg1") return 1;
    if (algo == "2" || algo == "alg2") return 2;
    throw CLI::ValidationError("--algo", "must be one of 1, 2, alg1, alg2");
}

int auto_d(const qlevy_model* model, int algorithm, double h, double gamma) {
    const qlevy_d_rule rule = algorithm == 1 ? QLEVY_D_SERIES : QLEVY_D_TAIL_BASIS;
    int d = 0;
    const qlevy_status st = qlevy_choose_d(model, rule, h, gamma, &d);
    if (st != QLEVY_OK) die("--d auto", st);
    return d;
}

/// "auto", a single level, or a comma-separated strictly increasing grid.
std::vector<int> parse_d(const std::string& spec, const qlevy_model* model, int algorithm,
                         double h, double gamma) {
    if (spec == "auto") return {auto_d(model, algorithm, h, gamma)};
    std::vector<int> grid;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        int value = 0;
        try {
            value = std::stoi(item, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != item.size() || value < 0)
            throw CLI::ValidationError("--d", "expected 'auto' or nonnegative integers");
        if (!grid.empty() && value <= grid.back())
            throw CLI::ValidationError("--d", "grid must be strictly increasing");
        grid.push_back(value);
    }
    if (grid.empty()) throw CLI::ValidationError("--d", "empty level list");
    return grid;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        std::cerr << "error: cannot write " << path << "\n";
        std::exit(1);
    }
}

struct Options {
    int k = 4;
    double h = 0.01;
    std::string eta = "pow:1:2";
    std::string algo = "1";
    std::string d = "auto";
    double gamma = 1.0;
    int n = 10000;
    std::uint64_t seed = 0;
    std::string out;
    int workers = 1;
};

void add_common(CLI::App* cmd, Options& opt) {
    cmd->set_help_flag("--help", "Print help"); // frees -h/--h for the step size
    cmd->add_option("--k", opt.k, "Number of retained basis directions")->check(CLI::PositiveNumber);
    cmd->add_option("--h", opt.h, "Step size")->check(CLI::PositiveNumber);
    cmd->add_option("--eta", opt.eta, "Spectrum: pow:<c>:<rho> or list:<v1>,<v2>,...");
    cmd->add_option("--algo", opt.algo, "Algorithm: 1|alg1 (series) or 2|alg2 (tail-corrected)");
    cmd->add_option("--d", opt.d, "Truncation level: integer, comma grid, or auto");
    cmd->add_option("--gamma", opt.gamma, "Target mean-square order for --d auto")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n", opt.n, "Monte Carlo replicates")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "Random seed");
    cmd->add_option("--out", opt.out, "Output path (default: stdout)");
    cmd->add_option("--workers", opt.workers, "Worker threads for studies")
        ->check(CLI::PositiveNumber);
}

int run_sample(const Options& opt) {
    const ModelPtr model = make_model(opt.eta, opt.k);
    const int algorithm = parse_algo(opt.algo);
    const std::vector<int> grid = parse_d(opt.d, model.get(), algorithm, opt.h, opt.gamma);
    if (grid.size() != 1)
        throw CLI::ValidationError("--d", "sample takes a single truncation level");

    const int k = opt.k;
    const int l = qlevy_pair_count(k);
    std::vector<double> dw(static_cast<std::size_t>(k));
    std::vector<double> areas(static_cast<std::size_t>(l));
    std::vector<double> integrals(static_cast<std::size_t>(k) * k);
    const qlevy_status st = qlevy_sample_step(model.get(), opt.h, algorithm, grid.front(),
                                              opt.seed, 0, dw.data(), areas.data(),
                                              integrals.data());
    if (st != QLEVY_OK) die("sample", st);

    std::string text = "kind,i,j,value\n";
    for (int i = 0; i < k; ++i)
        text += "dw," + std::to_string(i + 1) + ",," + fmt(dw[static_cast<std::size_t>(i)]) + "\n";
    for (int p = 0; p < l; ++p) {
        int i = 0, j = 0;
        qlevy_pair_at(k, p + 1, &i, &j);
        text += "area," + std::to_string(i) + "," + std::to_string(j) + "," +
                fmt(areas[static_cast<std::size_t>(p)]) + "\n";
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            text += "integral," + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                    fmt(integrals[static_cast<std::size_t>(i * k + j)]) + "\n";
    write_output(opt.out, text);
    return 0;
}

int run_convergence(const Options& opt) {
    const ModelPtr model = make_model(opt.eta, opt.k);
    const int algorithm = parse_algo(opt.algo);
    const std::vector<int> grid = parse_d(opt.d, model.get(), algorithm, opt.h, opt.gamma);

    size_t len = 0;
    double slope = 0.0;
    qlevy_status st = qlevy_convergence_csv(model.get(), opt.h, algorithm, grid.data(),
                                            static_cast<int>(grid.size()), opt.n, opt.seed,
                                            opt.workers, nullptr, 0, &len, &slope);
    if (st != QLEVY_OK) die("convergence", st);
    std::string csv(len, '\0');
    st = qlevy_convergence_csv(model.get(), opt.h, algorithm, grid.data(),
                               static_cast<int>(grid.size()), opt.n, opt.seed, opt.workers,
                               csv.data(), len + 1, &len, &slope);
    if (st != QLEVY_OK) die("convergence", st);
    write_output(opt.out, csv);
    if (grid.size() >= 3) std::cerr << "fitted log-log slope: " << fmt(slope) << "\n";
    return 0;
}

int run_verify(const Options& opt) {
    const ModelPtr model = make_model(opt.eta, opt.k);
    const std::vector<int> grid = parse_d(opt.d, model.get(), 2, opt.h, opt.gamma);
    if (grid.size() != 1)
        throw CLI::ValidationError("--d", "verify takes a single truncation level");
    const int d = grid.front();

    std::string text;
    bool all_pass = true;
    auto append = [&](const std::string& title, int pass, const std::string& body) {
        text += "[" + title + "]\n" + body;
        all_pass = all_pass && pass != 0;
    };
    for (const int algorithm : {1, 2}) {
        int pass = 0;
        size_t len = 0;
        qlevy_status st = qlevy_moment_report(model.get(), opt.h, algorithm, d, opt.n, opt.seed,
                                              &pass, nullptr, 0, &len);
        if (st != QLEVY_OK) die("verify moments", st);
        std::string body(len, '\0');
        st = qlevy_moment_report(model.get(), opt.h, algorithm, d, opt.n, opt.seed, &pass,
                                 body.data(), len + 1, &len);
        if (st != QLEVY_OK) die("verify moments", st);
        append("moments alg" + std::to_string(algorithm), pass, body);
    }
    if (opt.k >= 2) {
        int pass = 0;
        size_t len = 0;
        qlevy_status st =
            qlevy_factor_report(model.get(), opt.h, 100, opt.seed, &pass, nullptr, 0, &len);
        if (st != QLEVY_OK) die("verify factor", st);
        std::string body(len, '\0');
        st = qlevy_factor_report(model.get(), opt.h, 100, opt.seed, &pass, body.data(), len + 1,
                                 &len);
        if (st != QLEVY_OK) die("verify factor", st);
        append("tail-covariance factor", pass, body);
    }
    text += all_pass ? "VERIFY PASS\n" : "VERIFY FAIL\n";
    write_output(opt.out, text);
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterated stochastic integral sampler for Q-Wiener processes"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* sample = app.add_subcommand("sample", "Draw one step and print its components");
    CLI::App* convergence =
        app.add_subcommand("convergence", "Mean-square truncation error study over a D grid");
    CLI::App* verify =
        app.add_subcommand("verify", "Moment, identity, and covariance-factor checks");
    add_common(sample, opt);
    add_common(convergence, opt);
    add_common(verify, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample->parsed()) return run_sample(opt);
        if (convergence->parsed()) return run_convergence(opt);
        return run_verify(opt);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    }
}
