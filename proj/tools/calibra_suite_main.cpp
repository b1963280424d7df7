#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "calibra/suite.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string tag;
  std::uint64_t seed = 0;
  std::string junit_path;

  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--seed" && i + 1 < args.size()) {
      seed = std::stoull(args[++i]);
    } else if (args[i] == "--junit" && i + 1 < args.size()) {
      junit_path = args[++i];
    } else if (args[i] == "--help" || args[i] == "-h") {
      std::cout << "usage: calibra-suite TAG [--seed S] [--junit PATH]\n"
                << "  TAG: all";
      for (const auto& t : calibra::suite::suite_tags()) std::cout << " | " << t;
      std::cout << "\n";
      return 0;
    } else if (tag.empty()) {
      tag = args[i];
    } else {
      std::cerr << "error: unexpected argument '" << args[i] << "'\n";
      return 2;
    }
  }
  if (tag.empty()) {
    std::cerr << "error: missing suite tag (try --help)\n";
    return 2;
  }

  std::vector<std::string> tags;
  if (tag == "all")
    tags = calibra::suite::suite_tags();
  else
    tags.push_back(tag);

  bool all_ok = true;
  std::string junit;
  try {
    for (const auto& t : tags) {
      const auto result = calibra::suite::run_suite(t, seed);
      std::cout << calibra::suite::to_text(result);
      if (!junit_path.empty()) junit += calibra::suite::to_junit_xml(result);
      all_ok = all_ok && result.all_passed();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!junit_path.empty()) {
    std::ofstream os(junit_path, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot write '" << junit_path << "'\n";
      return 2;
    }
    os << junit;
  }
  return all_ok ? 0 : 1;
}
