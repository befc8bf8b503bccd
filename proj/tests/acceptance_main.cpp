#include <iostream>

#include "coag/acceptance.hpp"

int main(int argc, char** argv) {
  coag::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") opt.quick = true;
  }
  const auto rep = coag::run_acceptance(opt, std::cout);
  int fails = 0;
  for (const auto& r : rep.results)
    if (!r.pass) ++fails;
  std::cout << (fails == 0 ? "ALL CRITERIA PASSED" : "FAILED CRITERIA: ")
            << (fails ? std::to_string(fails) : "") << std::endl;
  return fails == 0 ? 0 : 1;
}
