#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpqkd/config.hpp"
#include "mpqkd/errors.hpp"
#include "mpqkd/sweep.hpp"
#include "mpqkd/validation.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kConfig = 2, kIo = 3 };

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
};

mpqkd::ExperimentConfig load(const Options& o)
{
    auto c = mpqkd::load_config(o.config);
    if (o.seed)
        c.master_seed = *o.seed;
    if (!o.out.empty())
        c.output_path = o.out;
    return c;
}

int generate_topology(const Options& o)
{
    auto c = load(o);
    auto point = mpqkd::point_config(c, c.graph_seeds.front(), c.strategies.front(), c.gamma_list.front(),
                                     c.n_parties.front());
    auto net = mpqkd::build_point_network(point, c.graph_seeds.front());
    if (c.output_path.empty()) {
        mpqkd::write_network(std::cout, net);
        return kOk;
    }
    std::ofstream out(c.output_path);
    if (!out)
        throw mpqkd::IoError("cannot open " + c.output_path + " for writing");
    mpqkd::write_network(out, net);
    if (!out)
        throw mpqkd::IoError("write to " + c.output_path + " failed");
    return kOk;
}

int sweep(const Options& o)
{
    auto c = load(o);
    if (c.output_path.empty()) {
        mpqkd::write_sweep(std::cout, c, o.threads);
        return kOk;
    }
    mpqkd::write_sweep_file(c.output_path, c, o.threads);
    std::cerr << "wrote " << mpqkd::sweep_row_count(c) << " rows to " << c.output_path << '\n';
    return kOk;
}

int validate(const Options& o)
{
    auto checks = o.seed ? mpqkd::run_validation({}, *o.seed) : mpqkd::run_validation();
    mpqkd::print_validation(std::cout, checks);
    for (const auto& c : checks)
        if (!c.passed)
            return kValidation;
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multipartite QKD routing simulator"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate-topology", "Write the configured network as text");
    gen->add_option("--config", o.config, "Config file")->required();
    gen->add_option("--out", o.out, "Output path (default: output.path or stdout)");
    gen->add_option("--seed", o.seed, "Master seed override");

    auto* sw = app.add_subcommand("sweep", "Run the configured parameter sweep and write CSV");
    sw->add_option("--config", o.config, "Config file")->required();
    sw->add_option("--out", o.out, "Output path (default: output.path or stdout)");
    sw->add_option("--seed", o.seed, "Master seed override");
    sw->add_option("--threads", o.threads, "Worker threads per data point")->check(CLI::PositiveNumber);

    double gamma_leader = 1.0, q = 1.0;
    std::vector<double> gamma_bobs;
    std::vector<std::size_t> lengths;
    auto* an = app.add_subcommand("analyze-star", "Evaluate the star key rate for given arm parameters");
    an->add_option("--gamma-leader", gamma_leader, "Leader arm gamma")->required()->check(CLI::Range(0.0, 1.0));
    an->add_option("--gamma-bobs", gamma_bobs, "Bob arm gammas")->required()->delimiter(',')->check(CLI::Range(0.0, 1.0));
    an->add_option("--q", q, "Swap success probability")->required()->check(CLI::Range(0.0, 1.0));
    an->add_option("--lengths", lengths, "Arm lengths in links, leader first")->required()->delimiter(',');

    auto* va = app.add_subcommand("validate", "Run the built-in oracle checks");
    va->add_option("--seed", o.seed, "Seed for the random draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*gen)
            return generate_topology(o);
        if (*sw)
            return sweep(o);
        if (*va)
            return validate(o);
        if (*an) {
            auto a = mpqkd::analyze_star(gamma_leader, gamma_bobs, q, lengths);
            mpqkd::print_star_analysis(std::cout, a);
            return kOk;
        }
    } catch (const mpqkd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const mpqkd::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const mpqkd::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kOk;
}
