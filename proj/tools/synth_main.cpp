// ecovid_synth: writes the seeded synthetic corpus used by the tests.
#include <iostream>

#include "CLI11.hpp"

#include "synthetic_corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic video corpus"};
  std::string out;
  ecovid::fixtures::SynthOptions o;
  bool config = false;
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--videos", o.videos, "Number of videos");
  app.add_option("--seed", o.seed, "Generator seed");
  app.add_option("--noise", o.popularity_noise, "Log-engagement noise");
  app.add_flag("--config", config, "Also write config.json next to the corpus");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto csv = ecovid::fixtures::write_synthetic_corpus(out, o);
    std::cout << csv.string() << "\n";
    if (config) std::cout << ecovid::fixtures::write_config(out, csv).string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
