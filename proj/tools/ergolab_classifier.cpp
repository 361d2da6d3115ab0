// Serves a built-in classifier over the external line protocol.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ergolab/classifiers.hpp"
#include "ergolab/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ergolab-classifier: line-protocol server for a built-in classifier"};
  std::string spec = "freq:4";
  app.add_option("--classifier", spec, "yes | no | freq:K[:C]");
  CLI11_PARSE(app, argc, argv);

  ergolab::ClassifierHandle c;
  try {
    c = ergolab::make_classifier(spec);
  } catch (const ergolab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::string line;
  if (!std::getline(std::cin, line) || line != "HELLO ergolab-classifier-1") return 1;
  std::cout << "OK " << c->name() << std::endl;
  while (std::getline(std::cin, line)) {
    if (line.rfind("CLASSIFY ", 0) != 0) return 1;
    try {
      const auto w = ergolab::Word::from_string(std::string_view(line).substr(9));
      std::cout << ergolab::to_string(c->classify(w)) << std::endl;
    } catch (const ergolab::Error&) {
      return 1;
    }
  }
  return 0;
}
