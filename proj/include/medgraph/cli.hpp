#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "medgraph/distance_oracle.hpp"
#include "medgraph/eccentricities.hpp"
#include "medgraph/graph.hpp"
#include "medgraph/testkit.hpp"
#include "medgraph/theta.hpp"

namespace medgraph::cli {

enum ExitCode : int { kOk = 0, kMismatch = 1, kUsage = 2, kInvalidInput = 3 };

struct Command {
  std::string name;  // gen, theta, median, ecc, oracle-build, oracle-query, oracle-verify, verify, bench
  std::string input;         // graph file, or label file for oracle-query
  std::string second_input;  // label file for oracle-verify
  std::string output;
  std::string weights;
  std::string spec;    // gen
  std::string family;  // bench
  std::vector<std::uint64_t> sizes;
  VertexId u = 0, v = 0;
  bool verify = false;
  std::uint64_t seed = 0;
  std::uint64_t pairs = 100000;
};

struct ParseOutcome {
  std::optional<Command> command;
  int exit_code = kOk;  // meaningful when command is empty (help or error)
};

inline const char* kFormatsHelp = R"(File formats:
  graph    line 1 "n m", then m lines "u v" with 0 <= u < v < n,
           sorted lexicographically, single spaces, LF endings.
  weights  n lines, line i holds the nonnegative integer weight of vertex i
           (at most 2^40).
  labels   header "MEDDO 1 n"; per vertex a line "vid k" then k records:
             B sub cls side gate dist
             U sub center dist Lsize c1..cL Tcount (c gate dist)*
             C sub
             L sub partner|-
Generator specs: path:N  tree:N[,seed=S]  grid:AxB[xC..]  hypercube:K
  closure:k=K,p=P[,seed=S][,mode=uniform|walk]  product:SPEC*SPEC
theta prints "class_id size sizeH1 sizeH2", H1 being the side holding vertex 0.
Exit codes: 0 ok, 1 verification mismatch, 2 usage, 3 invalid input.)";

inline ParseOutcome parse_args(const std::vector<std::string>& args, std::ostream& out,
                               std::ostream& err) {
  CLI::App app{"Median graph eccentricities and distance labels", "medgraph"};
  app.footer(kFormatsHelp);
  app.require_subcommand(1);
  Command cmd;
  auto seed_opt = [&](CLI::App* sub) {
    return sub->add_option("--seed", cmd.seed, "random seed (default 0)");
  };

  auto* gen = app.add_subcommand("gen", "generate a median graph");
  gen->add_option("spec", cmd.spec, "generator spec")->required();
  gen->add_option("-o,--output", cmd.output, "graph file to write")->required();
  seed_opt(gen);

  auto* theta = app.add_subcommand("theta", "list Theta-classes with halfspace sizes");
  theta->add_option("graph", cmd.input)->required();
  auto* median = app.add_subcommand("median", "print the median set");
  median->add_option("graph", cmd.input)->required();

  auto* ecc = app.add_subcommand("ecc", "all weighted eccentricities");
  ecc->add_option("graph", cmd.input)->required();
  ecc->add_option("--weights", cmd.weights, "weights file (default all zero)");
  ecc->add_flag("--verify", cmd.verify, "cross-check against brute force");

  auto* oracle = app.add_subcommand("oracle", "distance labels");
  oracle->require_subcommand(1);
  auto* build = oracle->add_subcommand("build", "build labels for a graph");
  build->add_option("graph", cmd.input)->required();
  build->add_option("-o,--output", cmd.output, "label file to write")->required();
  auto* q = oracle->add_subcommand("query", "distance between two vertices");
  q->add_option("labels", cmd.input)->required();
  q->add_option("u", cmd.u)->required();
  q->add_option("v", cmd.v)->required();
  auto* ov = oracle->add_subcommand("verify", "compare label distances with BFS");
  ov->add_option("graph", cmd.input)->required();
  ov->add_option("labels", cmd.second_input)->required();
  ov->add_option("--pairs", cmd.pairs, "sampled pairs when n > 512 (default 100000)");
  seed_opt(ov);

  auto* verify = app.add_subcommand("verify", "structural median-graph checks");
  verify->add_option("graph", cmd.input)->required();

  auto* bench = app.add_subcommand("bench", "timing table as CSV");
  bench->add_option("family", cmd.family, "grid|hypercube|tree|path|closure")
      ->required()
      ->check(CLI::IsMember({"grid", "hypercube", "tree", "path", "closure"}));
  bench->add_option("--sizes", cmd.sizes, "size parameters, comma separated")->delimiter(',');
  seed_opt(bench);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? kOk : kUsage};
  }
  if (gen->parsed()) cmd.name = "gen";
  else if (theta->parsed()) cmd.name = "theta";
  else if (median->parsed()) cmd.name = "median";
  else if (ecc->parsed()) cmd.name = "ecc";
  else if (build->parsed()) cmd.name = "oracle-build";
  else if (q->parsed()) cmd.name = "oracle-query";
  else if (ov->parsed()) cmd.name = "oracle-verify";
  else if (verify->parsed()) cmd.name = "verify";
  else if (bench->parsed()) cmd.name = "bench";
  return {cmd, kOk};
}

namespace detail {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw GraphError("cannot open '" + path + "'");
  return is;
}

inline Graph load_graph(const std::string& path) {
  auto is = open_in(path);
  return read_graph(is);
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write '" + path + "'");
  return os;
}

template <class F>
double time_ms(F&& f) {
  auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

inline std::string fixed(double x, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

}  // namespace detail

inline Graph bench_graph(const std::string& family, std::uint64_t size, std::uint64_t seed) {
  if (family == "grid") return testkit::grid({static_cast<VertexId>(size), static_cast<VertexId>(size)});
  if (family == "hypercube") return testkit::hypercube(static_cast<unsigned>(size));
  if (family == "tree") return testkit::random_tree(static_cast<VertexId>(size), seed);
  if (family == "path") return testkit::path(static_cast<VertexId>(size));
  if (family == "closure") return testkit::median_closure(12, static_cast<unsigned>(size), seed);
  throw detail::UsageError("unknown bench family '" + family + "'");
}

// One CSV row per size. grid sizes are side lengths, hypercube sizes are
// dimensions, closure sizes are seed-point counts in Q_12.
inline void run_bench(const std::string& family, const std::vector<std::uint64_t>& sizes,
                      std::uint64_t seed, std::ostream& out) {
  out << "n,m,t_morse_ms,t_brute_ms,t_build_ms,t_query_us_mean,max_label_bits\n";
  for (auto size : sizes) {
    Graph g = bench_graph(family, size, seed);
    const VertexId n = g.vertex_count();
    auto w = VertexWeights::zeros(n);
    std::vector<Dist> fast;
    double t_morse = detail::time_ms([&] { fast = morse(g, w); });
    std::string t_brute = "NA";
    if (n <= testkit::Guards::scaled(testkit::Guards::kBruteEcc)) {
      t_brute = detail::fixed(detail::time_ms([&] { testkit::brute_ecc(g, w.values()); }));
    }
    LabelTable table;
    double t_build = detail::time_ms([&] { table = build_oracle(g); });
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<VertexId> pick(0, n - 1);
    const int queries = 1000;
    Dist sink = 0;
    double t_query = detail::time_ms([&] {
      for (int i = 0; i < queries; ++i) sink += query(table, pick(rng), pick(rng));
    });
    (void)sink;
    out << n << ',' << g.edge_count() << ',' << detail::fixed(t_morse) << ',' << t_brute << ','
        << detail::fixed(t_build) << ',' << detail::fixed(t_query * 1000.0 / queries) << ','
        << label_size_bits(table).max_bits << '\n';
  }
}

inline int run(const Command& cmd, std::ostream& out, std::ostream& err) {
  try {
    if (cmd.name == "gen") {
      Graph g = testkit::generate(cmd.spec, cmd.seed);
      auto os = detail::open_out(cmd.output);
      write_graph(os, g);
      return kOk;
    }
    if (cmd.name == "theta") {
      Graph g = detail::load_graph(cmd.input);
      auto t = compute_theta_classes(g);
      auto sizes = halfspace_sizes_all(g, t);
      for (ClassId c = 0; c < t.class_count; ++c) {
        out << c << ' ' << t.class_size(c) << ' ' << sizes[c].side0 << ' ' << sizes[c].side1 << '\n';
      }
      return kOk;
    }
    if (cmd.name == "median") {
      Graph g = detail::load_graph(cmd.input);
      auto t = compute_theta_classes(g);
      auto sizes = halfspace_sizes_all(g, t);
      for (VertexId v : median_set(g, t, sizes)) out << v << '\n';
      return kOk;
    }
    if (cmd.name == "ecc") {
      Graph g = detail::load_graph(cmd.input);
      VertexWeights w = VertexWeights::zeros(g.vertex_count());
      if (!cmd.weights.empty()) {
        auto is = detail::open_in(cmd.weights);
        w = read_weights(is, g.vertex_count());
      }
      auto ecc = morse(g, w);
      for (VertexId v = 0; v < g.vertex_count(); ++v) out << v << ' ' << ecc[v] << '\n';
      if (cmd.verify) {
        auto expected = testkit::brute_ecc(g, w.values());
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
          if (expected[v] != ecc[v]) {
            err << "mismatch at vertex " << v << ": got " << ecc[v] << ", brute force " << expected[v]
                << '\n';
            return kMismatch;
          }
        }
      }
      return kOk;
    }
    if (cmd.name == "oracle-build") {
      Graph g = detail::load_graph(cmd.input);
      auto table = build_oracle(g);
      auto os = detail::open_out(cmd.output);
      write_labels(os, table);
      return kOk;
    }
    if (cmd.name == "oracle-query") {
      auto is = detail::open_in(cmd.input);
      auto table = read_labels(is);
      out << query(table, cmd.u, cmd.v) << '\n';
      return kOk;
    }
    if (cmd.name == "oracle-verify") {
      Graph g = detail::load_graph(cmd.input);
      auto is = detail::open_in(cmd.second_input);
      auto table = read_labels(is);
      const VertexId n = g.vertex_count();
      if (table.n != n) {
        err << "label table has " << table.n << " vertices, graph has " << n << '\n';
        return kMismatch;
      }
      std::uint64_t checked = 0, mismatches = 0;
      auto check_row = [&](VertexId s, const std::vector<VertexId>& targets) {
        auto row = bfs_distances(g, s);
        for (VertexId x : targets) {
          ++checked;
          Dist got = query(table, s, x);
          if (got != row[x]) {
            if (mismatches++ < 10) {
              err << "mismatch d(" << s << "," << x << "): labels " << got << ", bfs " << row[x] << '\n';
            }
          }
        }
      };
      if (n <= 512) {
        std::vector<VertexId> all(n);
        std::iota(all.begin(), all.end(), 0);
        for (VertexId s = 0; s < n; ++s) check_row(s, all);
      } else {
        std::mt19937_64 rng(cmd.seed);
        std::uniform_int_distribution<VertexId> pick(0, n - 1);
        const std::uint64_t per_source = 500;
        for (std::uint64_t done = 0; done < cmd.pairs;) {
          std::vector<VertexId> targets;
          for (std::uint64_t i = 0; i < per_source && done < cmd.pairs; ++i, ++done) {
            targets.push_back(pick(rng));
          }
          check_row(pick(rng), targets);
        }
      }
      out << "pairs " << checked << " mismatches " << mismatches << '\n';
      return mismatches ? kMismatch : kOk;
    }
    if (cmd.name == "verify") {
      Graph g = detail::load_graph(cmd.input);
      testkit::Guards::check(g.vertex_count(), testkit::Guards::kAllPairs, "verify");
      ThetaPartition t;
      try {
        t = compute_theta_classes(g);
        halfspace_sizes_all(g, t);
      } catch (const NotMedianGraph& e) {
        out << e.what() << '\n';
        testkit::AllPairsOracle d(g);
        auto median = testkit::is_median_graph(g, d);
        if (!median.ok) out << "median check: " << median.witness << '\n';
        return kMismatch;
      }
      auto report = testkit::verify_structure(g, t);
      if (g.vertex_count() <= testkit::Guards::scaled(testkit::Guards::kDjokovic)) {
        testkit::AllPairsOracle d(g);
        if (testkit::djokovic_partition(g, d) != t.class_of_edge) {
          report.violations.push_back("Theta-classes differ from the Djokovic relation");
        }
      }
      for (const auto& v : report.violations) out << v << '\n';
      if (report.ok()) out << "ok\n";
      return report.ok() ? kOk : kMismatch;
    }
    if (cmd.name == "bench") {
      run_bench(cmd.family, cmd.sizes, cmd.seed, out);
      return kOk;
    }
    err << "unknown command\n";
    return kUsage;
  } catch (const GraphError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const CorruptLabelTable& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const testkit::GuardExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

inline int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto parsed = parse_args(args, out, err);
  if (!parsed.command) return parsed.exit_code;
  return run(*parsed.command, out, err);
}

}  // namespace medgraph::cli
