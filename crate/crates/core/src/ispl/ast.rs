use std::fmt;

/// Scope name used for environment-owned variables.
pub const ENVIRONMENT: &str = "Environment";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Boolean,
    Range { lo: i64, hi: i64 },
}

impl Domain {
    pub fn size(&self) -> usize {
        match *self {
            Domain::Boolean => 2,
            Domain::Range { lo, hi } => (hi - lo + 1) as usize,
        }
    }

    pub fn lo(&self) -> i64 {
        match *self {
            Domain::Boolean => 0,
            Domain::Range { lo, .. } => lo,
        }
    }

    pub fn contains(&self, value: i64) -> bool {
        match *self {
            Domain::Boolean => value == 0 || value == 1,
            Domain::Range { lo, hi } => lo <= value && value <= hi,
        }
    }

    /// Values in ascending order (`false` before `true` for booleans).
    pub fn values(&self) -> impl Iterator<Item = i64> {
        let lo = self.lo();
        lo..lo + self.size() as i64
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self, Domain::Boolean)
    }

    pub fn ty(&self) -> Type {
        match self {
            Domain::Boolean => Type::Bool,
            Domain::Range { .. } => Type::Int,
        }
    }

    /// Renders a raw value the way it is written in model files and plan guards.
    pub fn render(&self, value: i64) -> String {
        match self {
            Domain::Boolean => (value != 0).to_string(),
            Domain::Range { .. } => value.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type {
    Int,
    Bool,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Int => "integer",
            Type::Bool => "boolean",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub domain: Domain,
}

/// A fully qualified variable reference: `owner` is `Environment` or an agent name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub owner: String,
    pub name: String,
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.owner, self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn apply(&self, l: i64, r: i64) -> bool {
        match self {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        }
    }
}

/// Resolved and type-checked model expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(VarRef),
    /// `Agent.Action = name`
    ActionIs { agent: String, action: String },
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub target: VarRef,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvolutionRule {
    pub assignments: Vec<Assignment>,
    pub condition: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtocolGuard {
    When(Expr),
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolRule {
    pub guard: ProtocolGuard,
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentDecl {
    pub name: String,
    pub vars: Vec<VarDecl>,
    pub actions: Vec<String>,
    pub protocol: Option<Vec<ProtocolRule>>,
    pub evolution: Vec<EvolutionRule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropositionDef {
    pub name: String,
    pub condition: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDef {
    pub name: String,
    pub members: Vec<String>,
}

/// ATL formula. Coalitions are named by a declared group or a single agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(String, Box<Formula>),
    Eventually(String, Box<Formula>),
    Always(String, Box<Formula>),
    Until(String, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn next(c: &str, f: Formula) -> Formula {
        Formula::Next(c.to_string(), Box::new(f))
    }

    pub fn eventually(c: &str, f: Formula) -> Formula {
        Formula::Eventually(c.to_string(), Box::new(f))
    }

    pub fn always(c: &str, f: Formula) -> Formula {
        Formula::Always(c.to_string(), Box::new(f))
    }

    pub fn until(c: &str, l: Formula, r: Formula) -> Formula {
        Formula::Until(c.to_string(), Box::new(l), Box::new(r))
    }

    /// Flattens a left-nested `and` chain into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(l, r) => {
                let mut out = l.conjuncts();
                out.extend(r.conjuncts());
                out
            }
            other => vec![other],
        }
    }
}

/// Parsed interpreted-systems model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub environment_vars: Vec<VarDecl>,
    pub environment_evolution: Vec<EvolutionRule>,
    pub agents: Vec<AgentDecl>,
    pub propositions: Vec<PropositionDef>,
    pub groups: Vec<GroupDef>,
    pub formulas: Vec<Formula>,
}

/// One entry of the global variable order: environment variables first, then
/// each agent's locals in agent declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualifiedVar {
    pub var: VarRef,
    pub domain: Domain,
}

impl QualifiedVar {
    pub fn is_environment(&self) -> bool {
        self.var.owner == ENVIRONMENT
    }
}

impl ModelSpec {
    pub fn variables(&self) -> Vec<QualifiedVar> {
        let env = self.environment_vars.iter().map(|v| QualifiedVar {
            var: VarRef {
                owner: ENVIRONMENT.to_string(),
                name: v.name.clone(),
            },
            domain: v.domain,
        });
        let locals = self.agents.iter().flat_map(|a| {
            a.vars.iter().map(move |v| QualifiedVar {
                var: VarRef {
                    owner: a.name.clone(),
                    name: v.name.clone(),
                },
                domain: v.domain,
            })
        });
        env.chain(locals).collect()
    }

    pub fn var_index(&self, var: &VarRef) -> Option<usize> {
        self.variables().iter().position(|q| &q.var == var)
    }

    pub fn agent(&self, name: &str) -> Option<&AgentDecl> {
        self.agents.iter().find(|a| a.name == name)
    }

    pub fn group(&self, name: &str) -> Option<&GroupDef> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn proposition(&self, name: &str) -> Option<&PropositionDef> {
        self.propositions.iter().find(|p| p.name == name)
    }

    /// Agents named by a coalition identifier: a group, or a single agent.
    pub fn coalition_members(&self, name: &str) -> Option<Vec<String>> {
        if let Some(g) = self.group(name) {
            return Some(g.members.clone());
        }
        self.agent(name).map(|a| vec![a.name.clone()])
    }
}
