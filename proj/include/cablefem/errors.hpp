#pragma once
#include <stdexcept>
#include <string>

namespace cablefem {

// Every failure mode the library reports maps to one of these. The CLI turns
// ParseError/ValidationError into exit 2 and solver failures into exit 3.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateTwist : ValidationError {
  using ValidationError::ValidationError;
};
struct MeshFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TangledMesh : MeshFailure {
  using MeshFailure::MeshFailure;
};
struct NoMatch : MeshFailure {
  using MeshFailure::MeshFailure;
};
struct BadRadius : ValidationError {
  using ValidationError::ValidationError;
};
struct SingularMaterial : ValidationError {
  using ValidationError::ValidationError;
};
struct OverConstrained : ValidationError {
  using ValidationError::ValidationError;
};
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoConvergence : SolverFailure {
  using SolverFailure::SolverFailure;
};
struct NewtonFailure : SolverFailure {
  using SolverFailure::SolverFailure;
};
struct NonIntegerPeriods : ValidationError {
  using ValidationError::ValidationError;
};
struct ZeroCurrent : ValidationError {
  using ValidationError::ValidationError;
};
struct UnknownGroup : ValidationError {
  using ValidationError::ValidationError;
};
struct MissingSeaRegion : ValidationError {
  using ValidationError::ValidationError;
};
struct ZeroReference : ValidationError {
  using ValidationError::ValidationError;
};
struct PointOutsideMesh : ValidationError {
  using ValidationError::ValidationError;
};
struct KeyMismatch : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace cablefem
