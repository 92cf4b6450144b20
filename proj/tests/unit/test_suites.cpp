#include <gtest/gtest.h>

#include <set>

#include "rwrp/errors.hpp"
#include "rwrp/suites.hpp"

namespace rwrp {
namespace {

TEST(Suites, NamesAreTheFiveBatteries) {
  const auto names = suite_names();
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()),
            (std::set<std::string>{"lattice", "duality", "appendix-c", "rates", "sampling"}));
}

TEST(Suites, UnknownNameIsRejected) { EXPECT_THROW(run_suite("nope"), ValidationError); }

TEST(Suites, AppendixCPassesAndTagsCriterion) {
  const SuiteReport rep = appendix_c_suite();
  EXPECT_TRUE(rep.passed());
  ASSERT_FALSE(rep.checks.empty());
  for (const SuiteCheck& c : rep.checks) EXPECT_EQ(c.criterion, 5) << c.name;
}

TEST(Suites, ReportFailsWhenAnyCheckFails) {
  SuiteReport rep{"x", {{1, "a", true, ""}, {1, "b", false, ""}}};
  EXPECT_FALSE(rep.passed());
  rep.checks[1].passed = true;
  EXPECT_TRUE(rep.passed());
}

}  // namespace
}  // namespace rwrp
