#ifndef DAGPROOF_DAGPROOF_HPP
#define DAGPROOF_DAGPROOF_HPP

#include "dagproof/error.hpp"
#include "dagproof/formula.hpp"
#include "dagproof/deduction.hpp"
#include "dagproof/checker.hpp"
#include "dagproof/assignment.hpp"
#include "dagproof/transform.hpp"
#include "dagproof/fst.hpp"
#include "dagproof/prover.hpp"
#include "dagproof/io.hpp"

#endif
