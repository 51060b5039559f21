#pragma once

#include <stdexcept>
#include <string>

namespace nft {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NFT_DEFINE_ERROR(Name)              \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  };

// graphs
NFT_DEFINE_ERROR(CycleError)
NFT_DEFINE_ERROR(DuplicateNodeError)
NFT_DEFINE_ERROR(UnknownNodeError)
NFT_DEFINE_ERROR(DuplicateEdgeError)
NFT_DEFINE_ERROR(DisjointnessError)

// distributions
NFT_DEFINE_ERROR(UnknownVariableError)
NFT_DEFINE_ERROR(ZeroProbabilityEvent)
NFT_DEFINE_ERROR(KernelMismatchError)
NFT_DEFINE_ERROR(InvalidDistributionError)

// scenarios and models
NFT_DEFINE_ERROR(NonBinaryContextError)
NFT_DEFINE_ERROR(UnknownMeasurementError)
NFT_DEFINE_ERROR(InvalidScenarioError)
NFT_DEFINE_ERROR(SupportError)
NFT_DEFINE_ERROR(ModelMismatchError)

// polytope
NFT_DEFINE_ERROR(ExplosionError)
NFT_DEFINE_ERROR(UndefinedConditional)

// file formats
NFT_DEFINE_ERROR(ParseError)

#undef NFT_DEFINE_ERROR

}  // namespace nft
