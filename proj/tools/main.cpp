#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "epides/estimators.hpp"
#include "epides/model_io.hpp"
#include "epides/verify.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace epides;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw input_error("cannot open file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw input_error("cannot write file: " + p.string());
  out << text;
}

// First `model NAME` directive of a spec file, for locating NAME.des next
// to it before the full parse.
std::string scan_model_name(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string head, name;
    if (ls >> head && head == "model" && ls >> name) return name;
  }
  return "";
}

void load_model_file(ModelRegistry& reg, const fs::path& path) {
  ModelFile mf = parse_model(read_file(path));
  std::string name = mf.name;
  if (!reg.emplace(name, std::move(mf)).second)
    throw input_error("model '" + name + "' loaded twice");
}

int cmd_verify(const std::string& spec_path,
               const std::vector<std::string>& model_paths,
               const std::string& engine_flag, const std::string& json_path) {
  ModelRegistry reg;
  for (const std::string& mp : model_paths) load_model_file(reg, mp);
  std::string text = read_file(spec_path);
  std::string mname = scan_model_name(text);
  if (!mname.empty() && !reg.count(mname)) {
    fs::path candidate = fs::path(spec_path).parent_path() / (mname + ".des");
    if (fs::exists(candidate)) load_model_file(reg, candidate);
  }
  SpecFile spec = parse_spec(text, reg);
  EngineChoice choice = spec.engine;
  if (!engine_flag.empty()) {
    auto parsed = parse_engine(engine_flag);
    if (!parsed) throw input_error("unknown engine '" + engine_flag + "'");
    choice = *parsed;
  }
  Verdict v = verify(spec.task, choice);
  std::string json = emit_verdict(v, spec.name);
  std::fputs(json.c_str(), stdout);
  if (!json_path.empty()) write_file(json_path, json);
  return v.holds ? 0 : 1;
}

int cmd_build(const std::string& estimator, const std::string& model_path,
              const std::string& dot_path) {
  ModelFile m = parse_model(read_file(model_path));
  std::string dot;
  BuildStats stats;
  std::size_t states = 0, edges = 0;
  if (estimator == "recognizer") {
    Recognizer rec = build_recognizer(m.aut, m.low);
    dot = to_dot(rec);
    stats = rec.stats;
  } else if (estimator == "double") {
    Recognizer rec = build_recognizer(m.aut, m.low);
    DoubleEstimator dbl = build_double(rec, m.high);
    dbl.stats.build_ms += rec.stats.build_ms;
    dot = to_dot(dbl);
    stats = dbl.stats;
  } else if (estimator == "twin") {
    Recognizer rec = build_recognizer(m.aut, m.low);
    TwinEstimator twin = build_twin(rec, m.high);
    twin.stats.build_ms += rec.stats.build_ms;
    dot = to_dot(twin);
    stats = twin.stats;
  } else {
    StatePairEstimator spe = build_state_pair(m.aut, m.low, m.high);
    dot = to_dot(spe);
    stats = spe.stats;
  }
  states = stats.states;
  edges = stats.edges;
  std::FILE* summary = dot_path == "-" ? stderr : stdout;
  std::fprintf(summary, "%s of %s: %zu states, %zu edges, built in %.3f ms\n",
               estimator.c_str(), m.name.c_str(), states, edges,
               stats.build_ms);
  if (dot_path == "-")
    std::fputs(dot.c_str(), stdout);
  else if (!dot_path.empty())
    write_file(dot_path, dot);
  return 0;
}

std::vector<Pattern> admissible_patterns() {
  std::vector<Pattern> out;
  for (Quantifier q : {Quantifier::ForAll, Quantifier::Exists})
    for (bool kl : {true, false})
      for (KHigh kh : {KHigh::Y, KHigh::N, KHigh::U})
        if (Pattern p{q, kl, kh}; admissible(p)) out.push_back(p);
  return out;
}

bool twin_can(const Pattern& p) {
  return p.quant == Quantifier::ForAll ? p.k_high != KHigh::U
                                       : p.k_high == KHigh::U;
}

bool spair_can(const Pattern& p) {
  return (p.quant == Quantifier::ForAll && p.k_low && p.k_high == KHigh::U) ||
         (p.quant == Quantifier::Exists && p.k_low && p.k_high == KHigh::Y);
}

// Model parameters drawn from the per-model seed, matching nothing else in
// the generator so the two stay independently seeded.
struct DrawnParams {
  std::size_t n_states, n_events;
  double density, p_low, p_high;
};

DrawnParams draw_params(std::uint64_t seed, std::size_t max_states,
                        std::size_t max_events) {
  std::mt19937_64 prng(seed ^ 0x5bf03635aca88c6cULL);
  DrawnParams d;
  d.n_states = 2 + prng() % (max_states - 1);
  d.n_events = 2 + prng() % (max_events - 1);
  d.density = 0.30 + static_cast<double>(prng() % 61) / 100.0;
  d.p_low = 0.20 + static_cast<double>(prng() % 71) / 100.0;
  d.p_high = 0.20 + static_cast<double>(prng() % 71) / 100.0;
  return d;
}

int cmd_crosscheck(std::uint64_t seed, std::size_t models,
                   std::size_t max_states, std::size_t max_events,
                   bool verbose) {
  const std::vector<Pattern> patterns = admissible_patterns();
  std::size_t comparisons = 0, disagreements = 0;
  for (std::size_t i = 0; i < models; ++i) {
    std::uint64_t s = seed + i;
    DrawnParams d = draw_params(s, max_states, max_events);
    ModelFile m =
        gen_random(s, d.n_states, d.n_events, d.density, d.p_low, d.p_high);

    std::mt19937_64 prng(s ^ 0xc2b2ae3d27d4eb4fULL);
    StateSet subset;
    for (StateId x = 0; static_cast<std::size_t>(x) < m.aut.num_states(); ++x)
      if (prng() % 100 < 35) subset.push_back(x);
    std::vector<KnowledgePredicate> preds;
    preds.push_back(
        KnowledgePredicate::dis(tspec_distinct_pairs(m.aut.num_states())));
    preds.push_back(KnowledgePredicate::dis(tspec_square(subset)));

    auto mismatch = [&](const char* what, const Pattern& p) {
      ++disagreements;
      std::fprintf(stderr, "disagreement (%s) on model %s pattern %s\n", what,
                   m.name.c_str(), to_string(p).c_str());
    };
    for (const KnowledgePredicate& pred : preds) {
      for (const Pattern& p : patterns) {
        auto task = make_task(m.aut, m.low, m.high, pred, {p});
        Verdict via_auto = verify(task, EngineChoice::Auto);
        Verdict via_oracle = verify(task, EngineChoice::Oracle);
        ++comparisons;
        if (via_auto.holds != via_oracle.holds) mismatch("auto/oracle", p);
        Verdict via_double = verify(task, EngineChoice::Double);
        ++comparisons;
        if (via_double.holds != via_oracle.holds) mismatch("double/oracle", p);
        if (twin_can(p)) {
          ++comparisons;
          if (verify(task, EngineChoice::Twin).holds != via_double.holds)
            mismatch("twin/double", p);
        }
        if (spair_can(p)) {
          ++comparisons;
          if (verify(task, EngineChoice::Spair).holds != via_double.holds)
            mismatch("spair/double", p);
        }
      }
    }
    if (verbose)
      std::fprintf(stderr, "checked %s (%zu states)\n", m.name.c_str(),
                   m.aut.num_states());
  }
  std::printf("crosscheck: %zu models, %zu comparisons, %zu disagreements\n",
              models, comparisons, disagreements);
  return disagreements == 0 ? 0 : 3;
}

int cmd_gen(std::uint64_t seed, std::size_t states, std::size_t events,
            double density, double p_low, double p_high,
            const std::string& out_path) {
  ModelFile m = gen_random(seed, states, events, density, p_low, p_high);
  std::string text = emit_model(m);
  if (out_path.empty() || out_path == "-")
    std::fputs(text.c_str(), stdout);
  else
    write_file(out_path, text);
  return 0;
}

int cmd_bench(const std::vector<std::string>& files,
              const std::vector<std::string>& engine_names,
              std::size_t random_count, std::uint64_t seed,
              std::size_t max_states, std::size_t max_events) {
  std::vector<BenchEntry> entries;
  for (const std::string& f : files) {
    try {
      ModelFile m = parse_model(read_file(f));
      std::string name = m.name;
      entries.push_back({name, std::move(m), ""});
    } catch (const std::exception& e) {
      entries.push_back({f, std::nullopt, e.what()});
    }
  }
  for (std::size_t i = 0; i < random_count; ++i) {
    std::uint64_t s = seed + i;
    DrawnParams d = draw_params(s, max_states, max_events);
    ModelFile m =
        gen_random(s, d.n_states, d.n_events, d.density, d.p_low, d.p_high);
    std::string name = m.name;
    entries.push_back({name, std::move(m), ""});
  }
  std::vector<EngineChoice> engines;
  for (const std::string& name : engine_names) {
    auto ec = parse_engine(name);
    if (!ec) throw input_error("unknown engine '" + name + "'");
    engines.push_back(*ec);
  }
  if (engines.empty())
    engines = {EngineChoice::Double, EngineChoice::Twin, EngineChoice::Spair};
  std::fputs(bench_csv(entries, engines).c_str(), stdout);
  return 0;
}

int cmd_explain(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw input_error("not a verdict file: " + std::string(e.what()));
  }
  std::string spec = j.value("spec", std::string("?"));
  bool holds = j.value("holds", false);
  std::string engine = j.value("engine", std::string("?"));
  std::printf("spec '%s', decided by the %s engine: %s\n", spec.c_str(),
              engine.c_str(), holds ? "HOLDS" : "VIOLATED");
  if (j.contains("witness")) {
    const auto& w = j["witness"];
    std::printf("  witness system string: %s\n",
                w.value("systemString", std::string()).c_str());
    std::printf("    the low observer sees:  %s\n",
                w.value("lowObs", std::string()).c_str());
    std::printf("    the high observer sees: %s\n",
                w.value("highObs", std::string()).c_str());
    if (w.contains("confusedString"))
      std::printf(
          "  confused with '%s': same high observation, opposite low-side "
          "knowledge\n",
          w.value("confusedString", std::string()).c_str());
    if (w.contains("lasso")) {
      auto join = [](const nlohmann::json& arr) {
        std::string s;
        for (const auto& e : arr) {
          if (!s.empty()) s += " ";
          s += e.get<std::string>();
        }
        return s;
      };
      std::printf("  repeating confusion: stem %s, cycle %s\n",
                  join(w["lasso"]["stem"]).c_str(),
                  join(w["lasso"]["cycle"]).c_str());
    }
  } else {
    std::printf("  no witness: %s\n",
                holds ? "the property holds as stated"
                      : "the verdict is definitional (no trace extracted)");
  }
  if (j.contains("stats")) {
    const auto& st = j["stats"];
    std::printf(
        "  sizes: recognizer %llu states, estimator %llu states; build "
        "%.3f ms, check %.3f ms\n",
        st.value("recognizerStates", 0ULL), st.value("estimatorStates", 0ULL),
        st.value("buildMs", 0.0), st.value("checkMs", 0.0));
  }
  for (const auto& note : j.value("interpretationNotes",
                                  std::vector<std::string>{}))
    std::printf("  note: %s\n", note.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Verification of epistemic properties of partially observed "
      "discrete-event systems"};
  app.require_subcommand(1);

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "Verify a specification file");
  std::string spec_path, engine_flag, json_path;
  std::vector<std::string> model_paths;
  verify_cmd->add_option("specfile", spec_path, "specification file")
      ->required();
  verify_cmd->add_option("--model", model_paths,
                         "model file to preload (repeatable)")
      ->type_size(1)
      ->allow_extra_args(false);
  verify_cmd->add_option("--engine", engine_flag,
                         "override the engine: auto|double|twin|spair|oracle");
  verify_cmd->add_option("--json", json_path,
                         "also write the verdict JSON to this file");

  // build
  auto* build_cmd =
      app.add_subcommand("build", "Build an estimator and report its size");
  std::string estimator, model_path, dot_path;
  build_cmd->add_option("--estimator", estimator, "which construction")
      ->required()
      ->check(CLI::IsMember({"recognizer", "double", "twin", "spair"}));
  build_cmd->add_option("modelfile", model_path, "model file")->required();
  build_cmd->add_option("--dot", dot_path,
                        "write the graph in DOT format ('-' for stdout)");

  // crosscheck
  auto* cross_cmd = app.add_subcommand(
      "crosscheck", "Compare all engines against the definitional oracle "
                    "on generated models");
  std::uint64_t cc_seed = 1;
  std::size_t cc_models = 50, cc_max_states = 6, cc_max_events = 4;
  bool cc_verbose = false;
  cross_cmd->add_option("--seed", cc_seed, "first seed (default 1)");
  cross_cmd->add_option("--models", cc_models, "number of models (default 50)");
  cross_cmd->add_option("--max-states", cc_max_states, "state cap (default 6)")
      ->check(CLI::Range(2, 10));
  cross_cmd->add_option("--max-events", cc_max_events, "event cap (default 4)")
      ->check(CLI::Range(2, 8));
  cross_cmd->add_flag("--verbose", cc_verbose, "report each model");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random model file");
  std::uint64_t g_seed = 1;
  std::size_t g_states = 5, g_events = 3;
  double g_density = 0.5, g_plow = 0.6, g_phigh = 0.6;
  std::string g_out;
  gen_cmd->add_option("--seed", g_seed, "generator seed (default 1)");
  gen_cmd->add_option("--states", g_states, "number of states (default 5)");
  gen_cmd->add_option("--events", g_events, "number of events (default 3)");
  gen_cmd->add_option("--density", g_density,
                      "transition fill probability (default 0.5)");
  gen_cmd->add_option("--p-low", g_plow,
                      "low observability probability (default 0.6)");
  gen_cmd->add_option("--p-high", g_phigh,
                      "high observability probability (default 0.6)");
  gen_cmd->add_option("--output,-o", g_out, "output path (default stdout)");

  // bench
  auto* bench_cmd = app.add_subcommand(
      "bench", "Measure construction sizes and times, CSV on stdout");
  std::vector<std::string> b_files, b_engines;
  std::size_t b_random = 0, b_max_states = 6, b_max_events = 4;
  std::uint64_t b_seed = 1;
  bench_cmd->add_option("modelfiles", b_files, "model files to measure");
  bench_cmd->add_option("--engine", b_engines,
                        "engine to measure (repeatable; default "
                        "double,twin,spair)")
      ->type_size(1)
      ->allow_extra_args(false);
  bench_cmd->add_option("--random", b_random,
                        "append this many generated models");
  bench_cmd->add_option("--seed", b_seed, "first seed for --random");
  bench_cmd->add_option("--max-states", b_max_states,
                        "state cap for --random")
      ->check(CLI::Range(2, 12));
  bench_cmd->add_option("--max-events", b_max_events,
                        "event cap for --random")
      ->check(CLI::Range(2, 8));

  // explain
  auto* explain_cmd =
      app.add_subcommand("explain", "Render a verdict JSON as plain text");
  std::string verdict_path;
  explain_cmd->add_option("verdictfile", verdict_path, "verdict JSON file")
      ->required();

  int rc = 0;
  verify_cmd->callback(
      [&] { rc = cmd_verify(spec_path, model_paths, engine_flag, json_path); });
  build_cmd->callback([&] { rc = cmd_build(estimator, model_path, dot_path); });
  cross_cmd->callback([&] {
    rc = cmd_crosscheck(cc_seed, cc_models, cc_max_states, cc_max_events,
                        cc_verbose);
  });
  gen_cmd->callback([&] {
    rc = cmd_gen(g_seed, g_states, g_events, g_density, g_plow, g_phigh,
                 g_out);
  });
  bench_cmd->callback([&] {
    rc = cmd_bench(b_files, b_engines, b_random, b_seed, b_max_states,
                   b_max_events);
  });
  explain_cmd->callback([&] { rc = cmd_explain(verdict_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const input_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const internal_error& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return rc;
}
