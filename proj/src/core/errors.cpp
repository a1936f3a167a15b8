#include "detlab/core/errors.hpp"

// Error types are header-only; this unit keeps their vtables in one place.
