#include "mpqkd/quantum.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>

#include "mpqkd/errors.hpp"
#include "mpqkd/rng.hpp"

namespace mpqkd {

double path_gamma(std::span<const double> gammas)
{
    if (gammas.empty())
        throw InvalidArgument("path_gamma needs at least one link");
    double g = 1.0;
    for (double x : gammas) {
        if (!(x >= 0.0 && x <= 1.0))
            throw InvalidArgument("link gamma outside [0, 1]");
        g *= x;
    }
    return g;
}

ErrorRates star_error_rates(double gamma_leader, std::span<const double> gamma_bobs)
{
    if (gamma_bobs.empty())
        throw InvalidArgument("star needs at least one Bob");
    if (!(gamma_leader >= 0.0 && gamma_leader <= 1.0))
        throw InvalidArgument("leader gamma outside [0, 1]");
    ErrorRates out;
    double prod = gamma_leader;
    for (double g : gamma_bobs) {
        if (!(g >= 0.0 && g <= 1.0))
            throw InvalidArgument("Bob gamma outside [0, 1]");
        out.q_ab.push_back((1.0 - gamma_leader * g) / 2.0);
        prod *= g;
    }
    out.q_x = (1.0 - prod) / 2.0;
    return out;
}

namespace {

double rate_from_expectation(double e) { return std::clamp((1.0 - e) / 2.0, 0.0, 1.0); }

} // namespace

ErrorRates error_rates_from_state(const DensityOperator& state, std::size_t leader_index)
{
    const std::size_t n = state.qubit_count();
    if (n < 2)
        throw InvalidArgument("error rates need at least two parties");
    if (leader_index >= n)
        throw InvalidArgument("leader index out of range");
    ErrorRates out;
    std::vector<Pauli> ps(n, Pauli::I);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == leader_index)
            continue;
        std::fill(ps.begin(), ps.end(), Pauli::I);
        ps[leader_index] = Pauli::Z;
        ps[i] = Pauli::Z;
        out.q_ab.push_back(rate_from_expectation(pauli_expectation(state, ps)));
    }
    std::fill(ps.begin(), ps.end(), Pauli::X);
    out.q_x = rate_from_expectation(pauli_expectation(state, ps));
    return out;
}

// ---------------------------------------------------------------------------
// Tree distribution

namespace {

struct Component {
    std::vector<QubitLabel> qubits;
    QubitLabel dangling{};
};

struct CountingBackend {
    std::size_t live = 0;
    std::size_t peak = 0;

    void pair(const QubitLabel&, const QubitLabel&, double)
    {
        live += 2;
        peak = std::max(peak, live);
    }
    void fuse(const QubitLabel&, const QubitLabel&, std::span<const QubitLabel>) { --live; }
    void measure_x(const QubitLabel&, const QubitLabel&) { --live; }
};

struct DensityBackend {
    DensityOperator state;
    std::size_t peak = 0;

    void pair(const QubitLabel& a, const QubitLabel& b, double gamma)
    {
        state = tensor(state, werner_pair({gamma}, a, b));
        peak = std::max(peak, state.qubit_count());
    }
    void fuse(const QubitLabel& retained, const QubitLabel& absorbed, std::span<const QubitLabel> side)
    {
        state = fusion_merge(state, retained, absorbed, side);
    }
    void measure_x(const QubitLabel& q, const QubitLabel& z) { state = measure_x_and_correct(state, q, z); }
};

class TreeWalker {
public:
    TreeWalker(const ContractedTree& tree, std::span<const double> gammas)
        : tree_(tree), gammas_(gammas), incident_(tree.incident_edges())
    {
        validate();
    }

    std::size_t vertex_count() const { return tree_.vertices.size(); }

    // children[v] = incident edge ids leading away from root, in processing order.
    std::vector<std::vector<std::size_t>> plan(std::size_t root, std::uint64_t shuffle_seed) const
    {
        const std::size_t n = vertex_count();
        std::vector<std::vector<std::size_t>> children(n);
        std::vector<std::size_t> order; // preorder
        std::vector<std::optional<std::size_t>> parent_edge(n);
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{root};
        seen[root] = 1;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (auto e : incident_[v]) {
                auto w = other(e, v);
                if (seen[w])
                    continue;
                seen[w] = 1;
                parent_edge[w] = e;
                children[v].push_back(e);
                stack.push_back(w);
            }
        }
        // Bottom-up (peak, final size) of each subtree processed standalone.
        std::vector<std::size_t> peak(n, 0), size(n, 0);
        auto key = [&](std::size_t e, std::size_t v) { return other(e, v); };
        if (shuffle_seed != 0) {
            Rng rng(shuffle_seed);
            for (std::size_t v = 0; v < n; ++v) {
                auto& c = children[v];
                for (std::size_t i = c.size(); i > 1; --i) {
                    auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
                    std::swap(c[i - 1], c[std::min(j, i - 1)]);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto v = *it;
            auto& c = children[v];
            if (shuffle_seed == 0) {
                std::sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) {
                    auto va = key(a, v), vb = key(b, v);
                    auto da = static_cast<long>(peak[va]) - static_cast<long>(size[va]);
                    auto db = static_cast<long>(peak[vb]) - static_cast<long>(size[vb]);
                    if (da != db)
                        return da > db;
                    return va < vb;
                });
            }
            if (c.empty()) {
                peak[v] = 2;
                size[v] = 2;
                continue;
            }
            std::size_t s = 0, pk = 0;
            for (std::size_t i = 0; i < c.size(); ++i) {
                auto w = key(c[i], v);
                pk = std::max(pk, s + peak[w]);
                s = (i == 0) ? size[w] : s + size[w] - 1;
            }
            if (parent_edge[v]) {
                pk = std::max(pk, s + 2);
                s += 1;
            }
            if (!tree_.is_terminal_vertex(v))
                s -= 1;
            peak[v] = pk;
            size[v] = s;
        }
        return children;
    }

    template <class Backend>
    std::vector<QubitLabel> run(std::size_t root, const std::vector<std::vector<std::size_t>>& children,
                                Backend& backend) const
    {
        std::vector<QubitLabel> terminal_qubit(tree_.terminal_count);
        visit(root, std::nullopt, children, backend, terminal_qubit);
        return terminal_qubit;
    }

private:
    std::size_t other(std::size_t e, std::size_t v) const
    {
        const auto& ce = tree_.edges[e];
        return ce.a == v ? ce.b : ce.a;
    }

    QubitLabel label(std::size_t v, std::size_t e) const
    {
        return QubitLabel{tree_.vertices[v], static_cast<std::uint32_t>(e + 1)};
    }

    template <class Backend>
    Component visit(std::size_t v, std::optional<std::size_t> pe, const std::vector<std::vector<std::size_t>>& children,
                    Backend& backend, std::vector<QubitLabel>& terminal_qubit) const
    {
        const auto& kids = children[v];
        if (kids.empty()) {
            // leaf terminal: its half of the parent-edge pair is its output qubit
            auto a = label(v, *pe), b = label(other(*pe, v), *pe);
            backend.pair(a, b, gammas_[*pe]);
            terminal_qubit[v] = a;
            return Component{{a, b}, b};
        }
        Component acc;
        QubitLabel retained{};
        for (std::size_t i = 0; i < kids.size(); ++i) {
            Component comp = visit(other(kids[i], v), kids[i], children, backend, terminal_qubit);
            if (i == 0) {
                acc = std::move(comp);
                retained = acc.dangling;
                continue;
            }
            std::vector<QubitLabel> side;
            for (const auto& q : comp.qubits)
                if (q != comp.dangling)
                    side.push_back(q);
            backend.fuse(retained, comp.dangling, side);
            acc.qubits.insert(acc.qubits.end(), side.begin(), side.end());
        }
        if (pe) {
            auto a = label(v, *pe), b = label(other(*pe, v), *pe);
            backend.pair(a, b, gammas_[*pe]);
            const QubitLabel side[1] = {b};
            backend.fuse(retained, a, side);
            acc.qubits.push_back(b);
            acc.dangling = b;
        }
        if (tree_.is_terminal_vertex(v)) {
            terminal_qubit[v] = retained;
        } else {
            std::optional<QubitLabel> z;
            for (const auto& q : acc.qubits)
                if (q != retained && (!z || q < *z))
                    z = q;
            backend.measure_x(retained, *z);
            acc.qubits.erase(std::find(acc.qubits.begin(), acc.qubits.end(), retained));
        }
        return acc;
    }

    void validate() const
    {
        const std::size_t n = vertex_count();
        if (tree_.terminal_count < 2)
            throw InvalidArgument("tree needs at least two terminals");
        if (tree_.terminal_count > kMaxTreeTerminals)
            throw CapacityError("tree has " + std::to_string(tree_.terminal_count) + " terminals (max " +
                                std::to_string(kMaxTreeTerminals) + ")");
        if (tree_.terminal_count > n || tree_.edges.size() + 1 != n)
            throw InvalidArgument("contracted tree must have |V| - 1 edges");
        if (gammas_.size() != tree_.edges.size())
            throw InvalidArgument("one gamma per contracted edge is required");
        for (double g : gammas_)
            if (!(g >= 0.0 && g <= 1.0))
                throw InvalidArgument("edge gamma outside [0, 1]");
        for (const auto& e : tree_.edges)
            if (e.a >= n || e.b >= n || e.a == e.b)
                throw InvalidArgument("contracted edge endpoint invalid");
        for (std::size_t v = tree_.terminal_count; v < n; ++v)
            if (incident_[v].size() < 2)
                throw InvalidArgument("repeater vertex " + std::to_string(tree_.vertices[v]) + " is a leaf");
        // connectivity (with |E| = |V| - 1 this implies acyclic)
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (auto e : incident_[v]) {
                auto w = other(e, v);
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        if (count != n)
            throw InvalidArgument("contracted tree is not connected");
    }

    const ContractedTree& tree_;
    std::span<const double> gammas_;
    std::vector<std::vector<std::size_t>> incident_;
};

std::vector<double> path_gammas(const ContractedTree& tree)
{
    std::vector<double> g;
    for (const auto& e : tree.edges)
        g.push_back(e.path.gamma_p);
    return g;
}

std::size_t choose_root(const TreeWalker& walker)
{
    std::size_t best_root = 0, best_peak = std::numeric_limits<std::size_t>::max();
    for (std::size_t r = 0; r < walker.vertex_count(); ++r) {
        CountingBackend counter;
        walker.run(r, walker.plan(r, 0), counter);
        if (counter.peak < best_peak) {
            best_peak = counter.peak;
            best_root = r;
        }
    }
    return best_root;
}

} // namespace

DensityOperator tree_state(const ContractedTree& tree, std::span<const double> edge_gammas,
                           const TreeMergeOptions& options, TreeStateStats* stats)
{
    TreeWalker walker(tree, edge_gammas);
    std::size_t root = options.root ? *options.root : choose_root(walker);
    if (root >= walker.vertex_count())
        throw InvalidArgument("merge root out of range");
    DensityBackend backend;
    auto qubits = walker.run(root, walker.plan(root, options.shuffle_seed), backend);
    if (stats) {
        stats->peak_qubits = backend.peak;
        stats->root = root;
    }
    std::vector<QubitLabel> out_labels;
    for (std::size_t t = 0; t < tree.terminal_count; ++t)
        out_labels.push_back({tree.vertices[t], 0});
    return backend.state.permuted(qubits).relabeled(std::move(out_labels));
}

DensityOperator tree_state(const ContractedTree& tree, const TreeMergeOptions& options, TreeStateStats* stats)
{
    auto g = path_gammas(tree);
    return tree_state(tree, g, options, stats);
}

std::size_t planned_peak_qubits(const ContractedTree& tree)
{
    auto g = path_gammas(tree);
    TreeWalker walker(tree, g);
    auto root = choose_root(walker);
    CountingBackend counter;
    walker.run(root, walker.plan(root, 0), counter);
    return counter.peak;
}

} // namespace mpqkd
