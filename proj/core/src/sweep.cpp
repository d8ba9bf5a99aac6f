#include "mpqkd/sweep.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "mpqkd/errors.hpp"

namespace mpqkd {

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace {

std::string topology_name(const TopologySpec& t)
{
    if (t.kind == TopologyKind::Grid)
        return "grid-" + std::to_string(t.width) + "x" + std::to_string(t.height);
    return "random-" + std::to_string(t.nodes) + "-r" + format_number(t.radius);
}

} // namespace

std::size_t sweep_row_count(const ExperimentConfig& c)
{
    return c.graph_seeds.size() * c.strategies.size() * c.gamma_list.size() * c.n_parties.size();
}

void write_sweep(std::ostream& out, const ExperimentConfig& c, std::size_t threads,
                 const std::function<void(std::size_t, std::size_t)>& progress)
{
    out << kCsvHeader << '\n';
    const auto total = sweep_row_count(c);
    std::size_t done = 0;
    for (auto seed : c.graph_seeds)
        for (auto strategy : c.strategies)
            for (double gamma : c.gamma_list)
                for (auto n : c.n_parties) {
                    auto pc = point_config(c, seed, strategy, gamma, n);
                    pc.threads = threads;
                    auto r = run_experiment(pc);
                    out << topology_name(c.topology) << ',' << to_string(c.layout.kind) << ',' << n << ','
                        << format_number(c.p) << ',' << format_number(c.q) << ',' << format_number(gamma) << ','
                        << to_string(strategy) << ',' << c.rounds << ',' << seed << ','
                        << format_number(r.mean_rate) << ',' << format_number(r.std_error) << ','
                        << format_number(r.trees_per_round_mean) << '\n';
                    if (progress)
                        progress(++done, total);
                }
}

void write_sweep_file(const std::string& path, const ExperimentConfig& config, std::size_t threads)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    write_sweep(out, config, threads);
    out.flush();
    if (!out)
        throw IoError("write to " + path + " failed");
}

} // namespace mpqkd
