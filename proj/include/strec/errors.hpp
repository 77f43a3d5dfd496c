#pragma once

#include <stdexcept>
#include <string>

namespace strec {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file (names file and line where possible).
struct ParseError : Error {
  using Error::Error;
};

/// Structurally valid input that violates a data invariant
/// (duplicate ids, inconsistent tables, unsupported format version).
struct IntegrityError : Error {
  using Error::Error;
};

/// A query that carries no terms after stopword removal.
struct EmptyQueryError : Error {
  using Error::Error;
};

/// Topic classification failed: no relevant documents in the corpus,
/// or none of them carries a mapped classification code.
struct UnclassifiableError : Error {
  using Error::Error;
};

/// Recommender construction over a partition with no documents.
struct EmptyPartitionError : Error {
  using Error::Error;
};

/// Evaluation of a topic that has no relevant documents judged.
struct UnjudgedTopicError : Error {
  using Error::Error;
};

}  // namespace strec
