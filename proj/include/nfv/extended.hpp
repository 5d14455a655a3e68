#pragma once

#include "nfv/extended/certify.hpp"
#include "nfv/extended/eval.hpp"
#include "nfv/extended/expr.hpp"
#include "nfv/extended/gadgets.hpp"
#include "nfv/extended/program.hpp"
#include "nfv/extended/rewrite.hpp"
#include "nfv/extended/text.hpp"
