#include "fusion/error.hpp"

namespace fusion {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingField: return "MissingField";
    case Errc::BadDate: return "BadDate";
    case Errc::BadCountry: return "BadCountry";
    case Errc::UnknownSchema: return "UnknownSchema";
    case Errc::BadConfig: return "BadConfig";
    case Errc::StorageUnavailable: return "StorageUnavailable";
    case Errc::UnparseableDate: return "UnparseableDate";
    case Errc::DanglingEdge: return "DanglingEdge";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::EmptyCriteria: return "EmptyCriteria";
    case Errc::InvalidCriterion: return "InvalidCriterion";
    case Errc::MixedSchemas: return "MixedSchemas";
    case Errc::InvalidNetwork: return "InvalidNetwork";
    case Errc::InvalidEvidence: return "InvalidEvidence";
    case Errc::InconsistentEvidence: return "InconsistentEvidence";
    case Errc::EvidenceOnQueryNode: return "EvidenceOnQueryNode";
    case Errc::MissingPriorityNode: return "MissingPriorityNode";
    case Errc::MissingCauseNode: return "MissingCauseNode";
    case Errc::ParseError: return "ParseError";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::UnfittedClassifier: return "UnfittedClassifier";
    case Errc::MalformedHtml: return "MalformedHtml";
    case Errc::MissingRequiredField: return "MissingRequiredField";
    case Errc::UnloadedLexicon: return "UnloadedLexicon";
    case Errc::PreconditionUnmet: return "PreconditionUnmet";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::NoLocationFound: return "NoLocationFound";
    case Errc::IncompleteMapping: return "IncompleteMapping";
    case Errc::UnhealthyStore: return "UnhealthyStore";
    case Errc::UnknownStore: return "UnknownStore";
    case Errc::NoAccessibleStores: return "NoAccessibleStores";
    case Errc::PolicyDenied: return "PolicyDenied";
    case Errc::DestinationUnreachable: return "DestinationUnreachable";
    case Errc::StoreUnavailable: return "StoreUnavailable";
    case Errc::BadCredentials: return "BadCredentials";
    case Errc::Locked: return "Locked";
    case Errc::Unauthorized: return "Unauthorized";
    case Errc::NotOwner: return "NotOwner";
    case Errc::UnknownReport: return "UnknownReport";
    case Errc::MalformedBox: return "MalformedBox";
    case Errc::UnknownCase: return "UnknownCase";
    case Errc::BadFilter: return "BadFilter";
    case Errc::InvalidTransition: return "InvalidTransition";
    case Errc::UnknownRecord: return "UnknownRecord";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::IdempotencyConflict: return "IdempotencyConflict";
    case Errc::NotFound: return "NotFound";
  }
  return "Unknown";
}

Error::Error(Errc code, std::string message, std::vector<std::string> details)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      details_(std::move(details)) {}

}  // namespace fusion
