// Regenerates the bundled synthetic benchmark files.

#include <iostream>

#include "CLI11.hpp"
#include "flare/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic routing benchmark (corpus, QA, mock oracle)"};
  flare::SyntheticOptions options;
  std::string out;
  app.add_option("--queries", options.queries, "Training queries");
  app.add_option("--test-queries", options.test_queries, "Held-out queries");
  app.add_option("--seed", options.seed, "Generator seed");
  app.add_option("--out", out, "Output directory")->required();
  CLI11_PARSE(app, argc, argv);

  auto bench = flare::make_synthetic_benchmark(options);
  flare::write_synthetic_benchmark(bench, out);
  std::cout << "documents: " << bench.corpus.size() << "\nqueries: " << bench.train.qa.size()
            << "\ntest queries: " << bench.test.qa.size() << '\n';
  return 0;
}
