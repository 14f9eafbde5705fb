#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fusion {

enum class Errc {
  // domain
  MissingField,
  BadDate,
  BadCountry,
  UnknownSchema,
  BadConfig,
  // graph
  StorageUnavailable,
  UnparseableDate,
  DanglingEdge,
  UnknownNode,
  // correlation
  EmptyCriteria,
  InvalidCriterion,
  MixedSchemas,
  // bayes
  InvalidNetwork,
  InvalidEvidence,
  InconsistentEvidence,
  EvidenceOnQueryNode,
  MissingPriorityNode,
  MissingCauseNode,
  ParseError,
  // chain
  InsufficientPoints,
  UnfittedClassifier,
  // nlu
  MalformedHtml,
  MissingRequiredField,
  UnloadedLexicon,
  PreconditionUnmet,
  UnknownClass,
  // incidents
  NoLocationFound,
  // gateway
  IncompleteMapping,
  UnhealthyStore,
  UnknownStore,
  NoAccessibleStores,
  PolicyDenied,
  DestinationUnreachable,
  StoreUnavailable,
  // service
  BadCredentials,
  Locked,
  Unauthorized,
  NotOwner,
  UnknownReport,
  MalformedBox,
  UnknownCase,
  BadFilter,
  InvalidTransition,
  UnknownRecord,
  SchemaViolation,
  IdempotencyConflict,
  NotFound,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-readable code plus an optional list of
/// detail strings (e.g. every violated field of a record).
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::vector<std::string> details = {});

  Errc code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  Errc code_;
  std::vector<std::string> details_;
};

}  // namespace fusion
