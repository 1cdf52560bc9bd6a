#pragma once

#include "schemec/cli.hpp"
#include "schemec/congruence.hpp"
#include "schemec/connectives.hpp"
#include "schemec/error.hpp"
#include "schemec/ha2.hpp"
#include "schemec/print.hpp"
#include "schemec/proposition.hpp"
#include "schemec/reduction.hpp"
#include "schemec/scheme.hpp"
#include "schemec/syntax.hpp"
#include "schemec/term.hpp"
#include "schemec/typing.hpp"
