// Minimal end-to-end tour: parse two runs and qrels from inline text, build a
// reproduce report, and print the tab-separated rendering.

#include <iostream>
#include <sstream>

#include "reprokit/reprokit.hpp"

namespace {

const char* kOrigRun =
    "301 Q0 d1 1 9.0 sysA\n"
    "301 Q0 d2 2 8.0 sysA\n"
    "301 Q0 d3 3 7.0 sysA\n"
    "301 Q0 d4 4 6.0 sysA\n"
    "302 Q0 d5 1 5.0 sysA\n"
    "302 Q0 d1 2 4.0 sysA\n"
    "302 Q0 d2 3 3.0 sysA\n"
    "302 Q0 d6 4 2.0 sysA\n";

const char* kRepRun =
    "301 Q0 d1 1 8.5 sysA_rep\n"
    "301 Q0 d3 2 7.5 sysA_rep\n"
    "301 Q0 d2 3 6.5 sysA_rep\n"
    "301 Q0 d4 4 5.5 sysA_rep\n"
    "302 Q0 d5 1 4.5 sysA_rep\n"
    "302 Q0 d2 2 3.5 sysA_rep\n"
    "302 Q0 d1 3 2.5 sysA_rep\n"
    "302 Q0 d7 4 1.5 sysA_rep\n";

const char* kQrels =
    "301 0 d1 1\n"
    "301 0 d2 1\n"
    "301 0 d3 0\n"
    "301 0 d4 0\n"
    "302 0 d5 1\n"
    "302 0 d6 1\n"
    "302 0 d1 0\n"
    "302 0 d2 0\n"
    "302 0 d7 0\n";

}  // namespace

int main() {
  std::istringstream orig_in(kOrigRun);
  std::istringstream rep_in(kRepRun);
  std::istringstream qrels_in(kQrels);

  const reprokit::Run orig = reprokit::parse_run(orig_in);
  const reprokit::Run rep = reprokit::parse_run(rep_in);
  const reprokit::Qrels qrels = reprokit::parse_qrels(qrels_in);

  reprokit::ReportOptions options;
  options.measures = {reprokit::MeasureSpec::parse("p@3"), reprokit::MeasureSpec::parse("ap")};
  options.cutoffs = {2, 3};

  const reprokit::ReproReport report = reprokit::build_reproduce(orig, rep, qrels, options);
  reprokit::render_text(std::cout, report);
  return 0;
}
