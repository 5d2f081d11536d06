#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehrlab/graph.hpp"
#include "ehrlab/theory.hpp"

namespace ehrlab {

struct SampleConfig {
  std::size_t n = 0;
  double c = 1.0;  // p = c / n
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  // InvalidArgument unless 0 <= c < n (or n <= 1 and c = 0) and trials >= 1.
  void validate() const;
};

// Seed of one trial, a function of (seed, trial) only.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

// G(n, c/n) by geometric skipping over the pairs (w, v), w < v, in order of v then w.
Graph sample_gnp(const SampleConfig& cfg, std::size_t trial);

// --- closed forms -------------------------------------------------------------

enum class CycleFormula { Paper, Standard };

struct LimitPair {
  double paper;     // prod_{i=3}^{M1} exp(-c^i / i!)
  double standard;  // prod_{i=3}^{M1} exp(-c^i / (2i))
};

LimitPair no_short_cycle_limit(double c, std::uint32_t M1);
double no_short_cycle_limit(double c, std::uint32_t M1, CycleFormula formula);
// c^s / (2s)
double expected_cycles(double c, std::uint32_t s);
// c^(s+d+W) / (2 W!)
double expected_keys(double c, std::uint32_t s, std::uint32_t d, std::uint32_t W);
// (C_H c^M_H / M_H!) e^{-c (M_H - L_H)} times the no-short-cycle factor.
double picture_limit(const Picture& h, double c, std::uint32_t M1, CycleFormula formula = CycleFormula::Paper);
// Per-vertex rate c^(l-1) e^(-l c) / a of isolated copies of a tree with l
// vertices and a automorphisms. InvalidArgument unless 'tree' is a tree.
double expected_tree_copies(const Graph& tree, double c);

// --- graph statistics -------------------------------------------------------

// Cycles of length s as subgraphs.
std::size_t count_cycles(const Graph& g, std::uint32_t s);
bool has_cycle_up_to(const Graph& g, std::uint32_t M1);
// Copies of the (s,d,W)-key: an s-cycle, a path of length d from a cycle
// vertex u to v (off the cycle when d >= 1), and W further neighbours of v
// off the cycle and the path.
std::size_t count_keys(const Graph& g, std::uint32_t s, std::uint32_t d, std::uint32_t W);
// Unicyclic components whose cycle has length <= M1.
std::size_t short_unicyclic_count(const Graph& g, std::uint32_t M1);
// Tree components of g isomorphic to 'tree'.
std::size_t isolated_copies(const Graph& g, const Graph& tree);
// Isomorphism-invariant form of a tree (rooted at its centre).
std::string unrooted_tree_form(const Graph& tree);
long double log_unrooted_tree_automorphisms(const Graph& tree);

// --- estimation -------------------------------------------------------------

struct AnalyticValue {
  std::string tag;
  double value;
};

struct Event {
  enum class Kind { Probability, Mean };
  std::string name;
  Kind kind = Kind::Probability;
  // Per-trial statistic: 0/1 for probabilities.
  std::function<double(const Graph&)> statistic;
  // Predicted values for a configuration; may be empty.
  std::function<std::vector<AnalyticValue>(const SampleConfig&)> analytic;
};

Event event_no_short_cycles(std::uint32_t M1);
Event event_picture(const Picture& h);
// Owns its type table; 'completion' is given as JSON.
Event event_completion(const nlohmann::json& completion);
Event event_completion_partition(std::uint32_t k, std::uint32_t M1, std::uint32_t M2);
Event event_many(std::uint32_t W, std::uint32_t M1);
Event event_bu(std::uint32_t s, std::uint32_t d, std::uint32_t W);
Event event_cycle_count(std::uint32_t s);
Event event_key_count(std::uint32_t s, std::uint32_t d, std::uint32_t W);
Event event_tree_copies(const Graph& tree);
Event event_edge_count();
Event event_edge_present(Vertex u, Vertex v);

// Event by name with parameters from JSON, e.g. ("no-short-cycles", {"M1": 3}).
// InvalidArgument for an unknown name; ParseError for bad parameters.
Event make_event(const std::string& name, const nlohmann::json& params);
std::vector<std::string> event_names();

struct AnalyticCheck {
  std::string tag;
  double value;
  double z;           // (value - point) / std_error; 0 when std_error is 0
  bool inside_ci99;
};

struct EstimateReport {
  std::string event;
  Event::Kind kind = Event::Kind::Probability;
  std::size_t n = 0;
  double c = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double point = 0;
  double std_error = 0;
  double ci95 = 0;  // half-width
  double ci95_low = 0, ci95_high = 0;
  double ci99_low = 0, ci99_high = 0;
  std::vector<AnalyticCheck> analytic;
  std::vector<double> per_trial;  // filled when requested
};

// Interval for a probability: normal approximation, Wilson when the point is
// within 5/trials of 0 or 1. For means: normal with the sample deviation.
EstimateReport estimate_event(const SampleConfig& cfg, const Event& event, bool keep_trials = false);

nlohmann::json report_to_json(const EstimateReport& r);
// "trial,value" rows; InvalidArgument if per-trial values were not kept.
std::string per_trial_csv(const EstimateReport& r);

struct ChiSquareResult {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 1;
};

// Goodness of fit of non-negative integer observations to Poisson(lambda).
// Bins 0, 1, ... are merged from the top until each expected count is >= 5.
ChiSquareResult poisson_goodness_of_fit(const std::vector<double>& observations, double lambda);

}  // namespace ehrlab
