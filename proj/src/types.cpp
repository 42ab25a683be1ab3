#include "depthseg/types.hpp"

#include <cmath>

namespace depthseg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SingularScatter: return "SingularScatter";
    case ErrorKind::DegenerateSubset: return "DegenerateSubset";
    case ErrorKind::InfeasibleIntervals: return "InfeasibleIntervals";
    case ErrorKind::EmptyIntervalSet: return "EmptyIntervalSet";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

DataMatrix::DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorKind::InvalidArgument, "depth", "data matrix must have at least one row and one column");
  }
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      if (!std::isfinite(values_(i, j))) {
        throw Error(ErrorKind::InvalidArgument, "depth",
                    "non-finite entry at row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1));
      }
    }
  }
}

MatrixView DataMatrix::span(const Span& sp) const {
  if (sp.s < 1 || sp.e < sp.s || sp.e > rows()) {
    throw Error(ErrorKind::InvalidArgument, "depth",
                "span [" + std::to_string(sp.s) + ", " + std::to_string(sp.e) + "] outside 1.." +
                    std::to_string(rows()));
  }
  return values_.middleRows(static_cast<Eigen::Index>(sp.s - 1), static_cast<Eigen::Index>(sp.length()));
}

}  // namespace depthseg
