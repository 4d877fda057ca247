#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace exbt::harness {

/// Records every panel row range a fitting step consumed. Before the
/// simulation starts, any read at or after the fold's test boundary is a
/// leak.
class LeakageAudit {
 public:
  struct Read {
    int fold = 0;
    std::string purpose;
    Eigen::Index begin = 0;
    Eigen::Index end = 0;
    Eigen::Index test_begin = 0;
    bool before_simulation = true;

    bool leaks() const { return before_simulation && end > test_begin; }
  };

  void record(int fold, std::string purpose, Eigen::Index begin, Eigen::Index end, Eigen::Index test_begin,
              bool before_simulation = true);
  /// Records rows given as indices (e.g. the rows of a design matrix).
  void record_rows(int fold, std::string purpose, const std::vector<Eigen::Index>& rows,
                   Eigen::Index test_begin, bool before_simulation = true);

  std::vector<Read> reads() const;
  std::vector<Read> violations() const;

  /// `fold,purpose,begin,end,test_begin,phase,leak`
  void write(const std::filesystem::path& path) const;

 private:
  mutable std::mutex mu_;
  std::vector<Read> reads_;
};

}  // namespace exbt::harness
