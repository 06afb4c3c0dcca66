#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace spamfilter;

struct RunFlags {
  std::string corpus;
  std::string layout = "lingspam";
  std::string stemming = "light";
  std::string classifier = "nb";
  double lambda = 1;
  std::size_t m = 0;
  std::string m_range;
  std::size_t k = 1;
  std::uint64_t seed = 1;
  std::string out = "-";

  RunConfig to_config(const CLI::App& sub) const {
    RunConfig config;
    config.corpus = corpus;
    config.layout = parse_layout(layout);
    config.stemming = parse_stemming(stemming);
    config.classifier.kind = parse_classifier(classifier);
    config.classifier.k = k;
    config.lambda = lambda;
    // stats has no --m option.
    const auto* m_option = sub.get_option_no_throw("--m");
    if (m_option && m_option->count() > 0) config.m = m;
    if (!m_range.empty()) config.m_range = parse_range(m_range);
    config.seed = seed;
    config.out = out;
    return config;
  }
};

void add_corpus_flags(CLI::App& sub, RunFlags& flags) {
  sub.add_option("--corpus", flags.corpus, "Corpus root directory")->required();
  sub.add_option("--layout", flags.layout, "Corpus layout: lingspam or fixture");
  sub.add_option("--stemming", flags.stemming, "Token normalization: none or light");
}

void add_run_flags(CLI::App& sub, RunFlags& flags) {
  add_corpus_flags(sub, flags);
  sub.add_option("--classifier", flags.classifier,
                 "nb, mb, or the test hooks legit (no filter) and oracle (gold labels)");
  sub.add_option("--lambda", flags.lambda, "Cost of blocking a legitimate message");
  sub.add_option("--k", flags.k, "Distinct distances in the mb neighborhood");
  sub.add_option("--seed", flags.seed, "Fold plan seed");
  sub.add_option("--out", flags.out, "Report path, - for standard output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-sensitive spam filtering experiments"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* stats = app.add_subcommand("stats", "Corpus composition");
  add_corpus_flags(*stats, flags);

  auto* evaluate = app.add_subcommand("evaluate", "10-fold cross-validation at one m");
  add_run_flags(*evaluate, flags);
  evaluate->add_option("--m", flags.m, "Number of attributes (default 100)");
  evaluate->add_option("--m-range", flags.m_range, "Not accepted; use sweep");

  auto* sweep = app.add_subcommand("sweep", "Cross-validation over a range of m");
  add_run_flags(*sweep, flags);
  sweep->add_option("--m-range", flags.m_range, "FROM:TO:STEP (default 50:700:50)");
  sweep->add_option("--m", flags.m, "Not accepted; use --m-range");

  cli::CompareOptions compare_options;
  std::size_t m_a = 0, m_b = 0;
  auto* compare = app.add_subcommand("compare", "Paired t-test between two reports");
  compare->add_option("first", compare_options.first, "Report expected to be better")->required();
  compare->add_option("second", compare_options.second, "Report to compare against")->required();
  compare->add_option("--m-a", m_a, "Row of the first report to use");
  compare->add_option("--m-b", m_b, "Row of the second report to use");

  cli::FixtureOptions fixture_options;
  auto* fixture = app.add_subcommand("fixture", "Write a synthetic corpus to disk");
  fixture->add_option("--seed", fixture_options.seed, "Generator seed");
  fixture->add_option("--legit", fixture_options.n_legit, "Legitimate messages");
  fixture->add_option("--spam", fixture_options.n_spam, "Spam messages");
  fixture->add_option("--out", fixture_options.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::config_error;
  }

  if (*compare) {
    if (compare->count("--m-a") > 0) compare_options.m_first = m_a;
    if (compare->count("--m-b") > 0) compare_options.m_second = m_b;
    return cli::cmd_compare(compare_options, std::cout, std::cerr);
  }
  if (*fixture) return cli::cmd_fixture(fixture_options, std::cout, std::cerr);

  CLI::App* active = *stats ? stats : *evaluate ? evaluate : sweep;
  RunConfig config;
  const int parsed = cli::guarded(std::cerr, [&] {
    config = flags.to_config(*active);
    return int{cli::ok};
  });
  if (parsed != cli::ok) return parsed;
  if (active == stats) return cli::cmd_stats(config, std::cout, std::cerr);
  if (active == evaluate) return cli::cmd_evaluate(config, std::cout, std::cerr);
  return cli::cmd_sweep(config, std::cout, std::cerr);
}
