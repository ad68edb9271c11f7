#pragma once

#include "revchain/types.hpp"
#include "revchain/plan.hpp"
#include "revchain/registry.hpp"
#include "revchain/trace.hpp"
#include "revchain/resolver.hpp"
#include "revchain/prompts.hpp"
#include "revchain/scripted.hpp"
#include "revchain/engine.hpp"
#include "revchain/executor.hpp"
#include "revchain/judge.hpp"
#include "revchain/generator.hpp"
#include "revchain/baselines.hpp"
#include "revchain/eval.hpp"
