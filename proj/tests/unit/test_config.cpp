#include <gtest/gtest.h>

#include <sstream>

#include "mpqkd/config.hpp"
#include "mpqkd/errors.hpp"
#include "mpqkd/sweep.hpp"

using namespace mpqkd;

namespace {

const std::string kMinimal = R"(topology.kind = grid
topology.width = 7
topology.height = 7
layout.kind = bet
protocol.n_parties = 3
params.p = 0.85
params.q = 0.85
params.gamma_list = 1.0
routing.strategy = dynamic-multi
)";

std::string replace_line(const std::string& text, const std::string& key, const std::string& line)
{
    std::istringstream in(text);
    std::string out, l;
    while (std::getline(in, l))
        out += (l.rfind(key + " ", 0) == 0 ? line : l) + "\n";
    return out;
}

std::string error_where(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.where();
    }
    return "<none>";
}

} // namespace

TEST(ParseConfig, MinimalFillsDefaults)
{
    auto c = parse_config(kMinimal);
    EXPECT_EQ(c.rounds, 1000u);
    EXPECT_EQ(c.swap_mode, SwapMode::Analytic);
    EXPECT_EQ(c.graph_seeds, (std::vector<std::uint64_t>{0}));
    EXPECT_EQ(c.master_seed, 0u);
    EXPECT_EQ(c.topology.kind, TopologyKind::Grid);
    EXPECT_EQ(c.topology.width, 7u);
    EXPECT_EQ(c.layout.kind, LayoutKind::Bet);
    EXPECT_EQ(c.n_parties, (std::vector<std::size_t>{3}));
    EXPECT_EQ(c.strategies, (std::vector<Mode>{Mode::DynamicMulti}));
    EXPECT_TRUE(c.output_path.empty());
}

TEST(ParseConfig, GammaRange)
{
    auto c = parse_config(replace_line(kMinimal, "params.gamma_list", "params.gamma_list = 0.97,0.975,...,1.0"));
    ASSERT_EQ(c.gamma_list.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i)
        EXPECT_NEAR(c.gamma_list[i], 0.97 + 0.005 * static_cast<double>(i), 1e-12);
    EXPECT_EQ(c.gamma_list.back(), 1.0);
    EXPECT_EQ(c.gamma_list[3], 0.985);
}

TEST(ParseConfig, FullRandomConfig)
{
    auto c = parse_config(R"(# comment line
topology.kind = random   # trailing comment
topology.nodes = 50
topology.radius = 0.3
topology.max_retries = 20
layout.kind = random
protocol.n_parties = 3, 4, ..., 6
params.p = 0.95
params.q = 0.9
params.gamma_list = 0.99, 1
routing.strategy = fixed-single, dynamic-multi
sim.rounds = 50
sim.graph_seeds = 0, 1, ..., 4
sim.master_seed = 77
sim.swap_mode = monte-carlo
output.path = out.csv
)");
    EXPECT_EQ(c.topology.nodes, 50u);
    EXPECT_DOUBLE_EQ(c.topology.radius, 0.3);
    EXPECT_EQ(c.topology.max_retries, 20u);
    EXPECT_EQ(c.n_parties, (std::vector<std::size_t>{3, 4, 5, 6}));
    EXPECT_EQ(c.graph_seeds, (std::vector<std::uint64_t>{0, 1, 2, 3, 4}));
    EXPECT_EQ(c.strategies, (std::vector<Mode>{Mode::FixedSingle, Mode::DynamicMulti}));
    EXPECT_EQ(c.swap_mode, SwapMode::MonteCarlo);
    EXPECT_EQ(c.master_seed, 77u);
    EXPECT_EQ(c.output_path, "out.csv");
}

TEST(ParseConfig, ErrorsNameTheKey)
{
    EXPECT_EQ(error_where(replace_line(kMinimal, "routing.strategy", "routing.strategy = warp")), "routing.strategy");
    EXPECT_EQ(error_where(kMinimal + "colour.scheme = red\n"), "colour.scheme");
    EXPECT_EQ(error_where(kMinimal + "sim.rounds = many\n"), "sim.rounds");
    EXPECT_EQ(error_where(kMinimal + "sim.rounds = 0\n"), "sim.rounds");
    EXPECT_EQ(error_where(kMinimal + "params.p = 0.5\n"), "params.p");
    EXPECT_EQ(error_where(replace_line(kMinimal, "params.q", "params.q = 1.5")), "params.q");
    EXPECT_EQ(error_where(replace_line(kMinimal, "params.gamma_list", "params.gamma_list = 1.0, 0.99")),
              "params.gamma_list");
    EXPECT_EQ(error_where(replace_line(kMinimal, "params.gamma_list", "params.gamma_list = 0.97, 0.975, ..., 0.9993")),
              "params.gamma_list");
    EXPECT_EQ(error_where(replace_line(kMinimal, "layout.kind", "layout.kind = hexagon")), "layout.kind");
    EXPECT_EQ(error_where(replace_line(kMinimal, "topology.width", "")), "topology.width");
    EXPECT_EQ(error_where(replace_line(kMinimal, "protocol.n_parties", "protocol.n_parties = 9")),
              "protocol.n_parties");
    EXPECT_EQ(error_where(kMinimal + "sim.swap_mode = quantum\n"), "sim.swap_mode");
    EXPECT_EQ(error_where(kMinimal + "topology.radius = 0.3\n"), "topology.radius");
}

TEST(ParseConfig, SyntaxErrorsNameTheLine)
{
    EXPECT_EQ(error_where(kMinimal + "\njust words\n"), "line 11");
    EXPECT_EQ(error_where("# header\nnodot = 3\n"), "line 2");
}

TEST(ParseConfig, LoadMissingFileIsIoError)
{
    EXPECT_THROW(load_config("/nonexistent/dir/config.txt"), IoError);
}

TEST(ExpandList, Progressions)
{
    EXPECT_EQ(expand_list("1, 2, ..., 5", "k"), (std::vector<std::string>{"1", "2", "3", "4", "5"}));
    EXPECT_EQ(expand_list("a,b", "k"), (std::vector<std::string>{"a", "b"}));
    EXPECT_THROW(expand_list("1, ..., 5", "k"), ConfigError);
    EXPECT_THROW(expand_list("1,,2", "k"), ConfigError);
    EXPECT_THROW(expand_list("1, 2, ..., 0", "k"), ConfigError);
}

TEST(Sweep, HeaderIsGolden)
{
    EXPECT_STREQ(kCsvHeader,
                 "topology,layout,n_parties,p,q,gamma,strategy,rounds,seed,mean_keyrate,std_error,trees_per_round");
}

TEST(Sweep, SingleRowAndFormat)
{
    auto c = parse_config(kMinimal + "sim.rounds = 20\n");
    std::ostringstream out;
    write_sweep(out, c);
    auto text = out.str();
    ASSERT_FALSE(text.empty());
    EXPECT_EQ(text.back(), '\n');
    std::istringstream in(text);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);)
        lines.push_back(l);
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], kCsvHeader);
    EXPECT_EQ(lines[1].rfind("grid-7x7,bet,3,0.85,0.85,1,dynamic-multi,20,0,", 0), 0u) << lines[1];
    EXPECT_EQ(std::count(lines[1].begin(), lines[1].end(), ','), 11);
}

TEST(Sweep, RowCountAndOrder)
{
    auto c = parse_config(R"(topology.kind = random
topology.nodes = 50
topology.radius = 0.3
layout.kind = random
protocol.n_parties = 3
params.p = 0.85
params.q = 0.85
params.gamma_list = 0.97,0.975,...,1.0
routing.strategy = fixed-single, fixed-multi, dynamic-single, dynamic-multi
sim.graph_seeds = 0, 1, 2, 3, 4
sim.rounds = 1
)");
    EXPECT_EQ(sweep_row_count(c), 140u);
    c.gamma_list.resize(2);
    c.graph_seeds.resize(2);
    c.strategies.resize(2);
    std::ostringstream out;
    std::vector<std::size_t> progress;
    write_sweep(out, c, 1, [&](std::size_t done, std::size_t total) {
        progress.push_back(done);
        EXPECT_EQ(total, 8u);
    });
    EXPECT_EQ(progress.size(), 8u);
    std::istringstream in(out.str());
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);)
        lines.push_back(l);
    ASSERT_EQ(lines.size(), 9u);
    // seed outermost, then strategy, then gamma
    EXPECT_NE(lines[1].find(",0.97,fixed-single,1,0,"), std::string::npos);
    EXPECT_NE(lines[2].find(",0.975,fixed-single,1,0,"), std::string::npos);
    EXPECT_NE(lines[3].find(",0.97,fixed-multi,1,0,"), std::string::npos);
    EXPECT_NE(lines[5].find(",0.97,fixed-single,1,1,"), std::string::npos);
    EXPECT_EQ(lines[1].rfind("random-50-r0.3,random,3,", 0), 0u);
}

TEST(Sweep, RerunIsByteIdentical)
{
    auto c = parse_config(replace_line(kMinimal, "params.gamma_list", "params.gamma_list = 0.99, 1.0") +
                          "sim.rounds = 30\nsim.master_seed = 5\n");
    std::ostringstream a, b, t;
    write_sweep(a, c);
    write_sweep(b, c);
    write_sweep(t, c, 3);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str(), t.str());
}

TEST(Sweep, UnwritablePathIsIoError)
{
    auto c = parse_config(kMinimal + "sim.rounds = 1\n");
    EXPECT_THROW(write_sweep_file("/nonexistent/dir/out.csv", c), IoError);
}

TEST(FormatNumber, TenSignificantDigits)
{
    EXPECT_EQ(format_number(0.1234567890123), "0.123456789");
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(0.0), "0");
}
