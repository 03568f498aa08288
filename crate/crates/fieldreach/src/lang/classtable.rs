//! Class table: subclass relation, inherited fields and the global set of
//! reference fields.

use std::collections::HashMap;

use super::ast::{Program, TypeName};
use super::error::LangError;

pub type ClassId = usize;
pub type FieldId = usize;

/// A resolved type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Int,
    Ref(ClassId),
}

impl Ty {
    pub fn is_ref(self) -> bool {
        matches!(self, Ty::Ref(_))
    }
}

/// A field declaration, identified globally by its name (field names are
/// unique across the whole program).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldInfo {
    pub name: String,
    pub owner: ClassId,
    pub ty: Ty,
}

/// A class with its direct superclass and fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub name: String,
    pub parent: Option<ClassId>,
    /// Fields declared by this class.
    pub own_fields: Vec<FieldId>,
    /// Inherited fields first (root-most class first), then own fields.
    pub all_fields: Vec<FieldId>,
}

/// The class table of a program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTable {
    pub classes: Vec<ClassInfo>,
    pub fields: Vec<FieldInfo>,
    class_index: HashMap<String, ClassId>,
    field_index: HashMap<String, FieldId>,
    /// `sub[a][b]` iff `a ⪯ b` (reflexive-transitive).
    sub: Vec<Vec<bool>>,
}

impl ClassTable {
    pub fn class_id(&self, name: &str) -> Option<ClassId> {
        self.class_index.get(name).copied()
    }

    pub fn field_id(&self, name: &str) -> Option<FieldId> {
        self.field_index.get(name).copied()
    }

    pub fn class_name(&self, c: ClassId) -> &str {
        &self.classes[c].name
    }

    pub fn field_name(&self, f: FieldId) -> &str {
        &self.fields[f].name
    }

    /// `a ⪯ b`.
    pub fn is_subclass(&self, a: ClassId, b: ClassId) -> bool {
        self.sub[a][b]
    }

    /// All classes `κ ⪯ c`, in id order.
    pub fn subclasses(&self, c: ClassId) -> Vec<ClassId> {
        (0..self.classes.len()).filter(|&k| self.sub[k][c]).collect()
    }

    /// Fields of `c` including inherited ones.
    pub fn fields_of(&self, c: ClassId) -> &[FieldId] {
        &self.classes[c].all_fields
    }

    /// True if objects of class `c` have field `f`.
    pub fn has_field(&self, c: ClassId, f: FieldId) -> bool {
        self.sub[c][self.fields[f].owner]
    }

    /// The global set of reference fields, in declaration order.
    pub fn ref_fields(&self) -> Vec<FieldId> {
        (0..self.fields.len())
            .filter(|&f| self.fields[f].ty.is_ref())
            .collect()
    }

    /// Resolves a declared type name.
    pub fn resolve_type(&self, t: &TypeName) -> Option<Ty> {
        match t {
            TypeName::Int => Some(Ty::Int),
            TypeName::Class(c) => self.class_id(c).map(Ty::Ref),
        }
    }

    /// Renders a resolved type.
    pub fn type_name(&self, t: Ty) -> String {
        match t {
            Ty::Int => "int".to_string(),
            Ty::Ref(c) => self.class_name(c).to_string(),
        }
    }

    /// Builds a class table from a parsed program.
    pub fn build(p: &Program) -> Result<ClassTable, LangError> {
        let mut class_index = HashMap::new();
        for (i, c) in p.classes.iter().enumerate() {
            if class_index.insert(c.name.clone(), i).is_some() {
                return Err(LangError::Class(format!("duplicate class `{}`", c.name)));
            }
        }
        let n = p.classes.len();
        let mut parent = vec![None; n];
        for (i, c) in p.classes.iter().enumerate() {
            if let Some(sup) = &c.extends {
                let j = *class_index.get(sup).ok_or_else(|| {
                    LangError::Class(format!("class `{}` extends unknown class `{sup}`", c.name))
                })?;
                parent[i] = Some(j);
            }
        }
        // Reject cyclic `extends` chains.
        for start in 0..n {
            let mut seen = vec![false; n];
            let mut cur = Some(start);
            while let Some(c) = cur {
                if seen[c] {
                    return Err(LangError::Class(format!(
                        "cyclic inheritance involving `{}`",
                        p.classes[start].name
                    )));
                }
                seen[c] = true;
                cur = parent[c];
            }
        }
        let mut sub = vec![vec![false; n]; n];
        for (a, row) in sub.iter_mut().enumerate() {
            let mut cur = Some(a);
            while let Some(c) = cur {
                row[c] = true;
                cur = parent[c];
            }
        }
        let mut fields = Vec::new();
        let mut field_index = HashMap::new();
        let mut own = vec![Vec::new(); n];
        for (i, c) in p.classes.iter().enumerate() {
            for fd in &c.fields {
                let ty = match &fd.ty {
                    TypeName::Int => Ty::Int,
                    TypeName::Class(k) => Ty::Ref(*class_index.get(k).ok_or_else(|| {
                        LangError::Class(format!(
                            "field `{}` of `{}` has unknown type `{k}`",
                            fd.name, c.name
                        ))
                    })?),
                };
                if field_index.contains_key(&fd.name) {
                    return Err(LangError::Class(format!(
                        "duplicate field name `{}` (field names must be unique program-wide)",
                        fd.name
                    )));
                }
                field_index.insert(fd.name.clone(), fields.len());
                own[i].push(fields.len());
                fields.push(FieldInfo {
                    name: fd.name.clone(),
                    owner: i,
                    ty,
                });
            }
        }
        let classes = (0..n)
            .map(|i| {
                let mut chain = Vec::new();
                let mut cur = Some(i);
                while let Some(c) = cur {
                    chain.push(c);
                    cur = parent[c];
                }
                let all_fields = chain.iter().rev().flat_map(|&c| own[c].clone()).collect();
                ClassInfo {
                    name: p.classes[i].name.clone(),
                    parent: parent[i],
                    own_fields: own[i].clone(),
                    all_fields,
                }
            })
            .collect();
        Ok(ClassTable {
            classes,
            fields,
            class_index,
            field_index,
            sub,
        })
    }
}

/// Builds a class table from a parsed program.
pub fn build_class_table(p: &Program) -> Result<ClassTable, LangError> {
    ClassTable::build(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;

    pub const EMPLOYEES: &str = "class Emp { LP mD; }\nclass L1 extends Emp { }\n\
        class L2 extends Emp { TB aD; }\nclass Dev { Emp owner; }\n\
        class LP extends Dev { }\nclass TB extends Dev { LP lnk; }\n";

    fn names(ct: &ClassTable, fs: &[FieldId]) -> Vec<String> {
        let mut v: Vec<_> = fs.iter().map(|&f| ct.field_name(f).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn employee_hierarchy() {
        let ct = ClassTable::build(&parse_program(EMPLOYEES).unwrap()).unwrap();
        let l2 = ct.class_id("L2").unwrap();
        assert_eq!(names(&ct, ct.fields_of(l2)), vec!["aD", "mD"]);
        let dev = ct.class_id("Dev").unwrap();
        let mut subs: Vec<_> = ct
            .subclasses(dev)
            .into_iter()
            .map(|c| ct.class_name(c).to_string())
            .collect();
        subs.sort();
        assert_eq!(subs, vec!["Dev", "LP", "TB"]);
        assert_eq!(names(&ct, &ct.ref_fields()), vec!["aD", "lnk", "mD", "owner"]);
    }

    #[test]
    fn no_fields() {
        let ct = ClassTable::build(&parse_program("class A { }").unwrap()).unwrap();
        assert!(ct.ref_fields().is_empty());
    }

    #[test]
    fn duplicate_field_rejected() {
        let p = parse_program("class A { A f; }\nclass B { B f; }").unwrap();
        assert!(matches!(ClassTable::build(&p), Err(LangError::Class(_))));
    }

    #[test]
    fn cyclic_extends_rejected() {
        let p = parse_program("class A extends B { }\nclass B extends A { }").unwrap();
        assert!(ClassTable::build(&p).is_err());
        let p = parse_program("class A extends Z { }").unwrap();
        assert!(ClassTable::build(&p).is_err());
    }

    #[test]
    fn int_fields_excluded_from_reference_fields() {
        let p = parse_program("class A { int k; A nx; }").unwrap();
        let ct = ClassTable::build(&p).unwrap();
        assert_eq!(ct.fields.len(), 2);
        assert_eq!(names(&ct, &ct.ref_fields()), vec!["nx"]);
    }
}
