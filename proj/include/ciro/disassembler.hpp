#pragma once

#include "ciro/disassembler/env.hpp"
#include "ciro/disassembler/evaluate.hpp"
#include "ciro/disassembler/oracle.hpp"
#include "ciro/disassembler/policy_io.hpp"
#include "ciro/disassembler/qlearning.hpp"
