#pragma once

#include <string>
#include <vector>

namespace gsp4 {

struct ReportRow {
  std::string check;
  std::string params;
  std::string status;  // pass | fail | skipped
  std::string lhs, rhs;

  static ReportRow pass(std::string check, std::string params) {
    return {std::move(check), std::move(params), "pass", "", ""};
  }
  static ReportRow fail(std::string check, std::string params, std::string l,
                        std::string r) {
    return {std::move(check), std::move(params), "fail", std::move(l),
            std::move(r)};
  }
  static ReportRow skipped(std::string check, std::string params) {
    return {std::move(check), std::move(params), "skipped", "", ""};
  }
  static ReportRow of(bool ok, std::string check, std::string params,
                      std::string l = "", std::string r = "") {
    return ok ? pass(std::move(check), std::move(params))
              : fail(std::move(check), std::move(params), std::move(l),
                     std::move(r));
  }
};

using Report = std::vector<ReportRow>;

inline size_t count_fail(const Report& r) {
  size_t n = 0;
  for (auto& row : r) n += (row.status == "fail");
  return n;
}

}  // namespace gsp4
