#include "exbt/harness/audit.hpp"

#include <algorithm>
#include <fstream>

#include "exbt/error.hpp"

namespace exbt::harness {

void LeakageAudit::record(int fold, std::string purpose, Eigen::Index begin, Eigen::Index end,
                          Eigen::Index test_begin, bool before_simulation) {
  std::lock_guard lock(mu_);
  reads_.push_back({fold, std::move(purpose), begin, end, test_begin, before_simulation});
}

void LeakageAudit::record_rows(int fold, std::string purpose, const std::vector<Eigen::Index>& rows,
                               Eigen::Index test_begin, bool before_simulation) {
  if (rows.empty()) return;
  const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end());
  record(fold, std::move(purpose), *lo, *hi + 1, test_begin, before_simulation);
}

std::vector<LeakageAudit::Read> LeakageAudit::reads() const {
  std::lock_guard lock(mu_);
  std::vector<Read> out = reads_;
  std::stable_sort(out.begin(), out.end(), [](const Read& a, const Read& b) { return a.fold < b.fold; });
  return out;
}

std::vector<LeakageAudit::Read> LeakageAudit::violations() const {
  std::vector<Read> out;
  for (const auto& r : reads()) {
    if (r.leaks()) out.push_back(r);
  }
  return out;
}

void LeakageAudit::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "fold,purpose,begin,end,test_begin,phase,leak\n";
  for (const auto& r : reads()) {
    out << r.fold << ',' << r.purpose << ',' << r.begin << ',' << r.end << ',' << r.test_begin << ','
        << (r.before_simulation ? "fit" : "simulate") << ',' << (r.leaks() ? 1 : 0) << '\n';
  }
}

}  // namespace exbt::harness
