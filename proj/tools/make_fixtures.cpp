// Regenerates the bundled CSV fixtures under the given directory.
#include <fstream>
#include <iostream>
#include <string>

#include "epimon/fixtures.hpp"

namespace {

void write(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  std::cout << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";
  const epimon::Epoch epoch{2020, 3, 1};
  const auto res = epimon::resurgence_fixture();
  write(dir + "/resurgence_adv.csv", epimon::to_csv(res.adv, epoch));
  write(dir + "/resurgence_disp.csv", epimon::to_csv(res.disp, epoch));
  epimon::FixtureOptions decay;
  decay.resurgence = false;
  const auto dec = epimon::resurgence_fixture(decay);
  write(dir + "/decaying_adv.csv", epimon::to_csv(dec.adv, epoch));
  write(dir + "/decaying_disp.csv", epimon::to_csv(dec.disp, epoch));
  write(dir + "/two_phase.csv", epimon::to_csv(epimon::two_phase_fixture(), epoch));
  return 0;
}
