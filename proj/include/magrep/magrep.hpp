#ifndef MAGREP_MAGREP_HPP
#define MAGREP_MAGREP_HPP

#include "magrep/catalog.hpp"
#include "magrep/corep.hpp"
#include "magrep/error.hpp"
#include "magrep/group.hpp"
#include "magrep/io.hpp"
#include "magrep/kp.hpp"
#include "magrep/linalg.hpp"
#include "magrep/reduce.hpp"
#include "magrep/types.hpp"

#endif
