#pragma once

// Umbrella header.

#include "asram/asm.hpp"
#include "asram/diag.hpp"
#include "asram/fault.hpp"
#include "asram/hierarchy.hpp"
#include "asram/isa.hpp"
#include "asram/linear_form.hpp"
#include "asram/oracle.hpp"
#include "asram/progs.hpp"
#include "asram/render.hpp"
#include "asram/value.hpp"
#include "asram/verdict.hpp"
#include "asram/vm.hpp"
