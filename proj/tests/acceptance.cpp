#include <iostream>

#include "CLI11.hpp"
#include "opm/verification.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1..10"};
  opm::VerifyOptions o;
  app.add_option("--workers", o.workers);
  app.add_option("--out", o.scratch_dir);
  app.add_option("--sace-paths", o.sace_paths);
  app.add_option("--jump-paths", o.jump_paths);
  CLI11_PARSE(app, argc, argv);
  int failed = 0;
  const std::vector<int> ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  for (int id : ids) {
    std::vector<opm::CheckResult> rs;
    if (id == 8) continue;  // reported with 7
    if (id == 7) rs = opm::check_sace_ensemble(o);
    else rs = opm::run_checks({id}, o);
    for (const auto& r : rs) {
      std::cout << opm::format_line(r) << std::endl;
      failed += !r.passed;
    }
  }
  std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
  return failed ? 1 : 0;
}
