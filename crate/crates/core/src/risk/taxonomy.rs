use std::fmt;
use std::str::FromStr;

/// Lowercase, alphanumerics only: "Mobile devices and phones" → "mobiledevicesandphones".
fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

macro_rules! category {
    (
        $(#[$m:meta])*
        $name:ident, $what:literal {
            $($variant:ident => $canon:literal $(| $alias:literal)*),+ $(,)?
        }
    ) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => stringify!($variant)),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let key = normalize(s);
                match key.as_str() {
                    $($canon $(| $alias)* => Ok($name::$variant),)+
                    _ => Err(format!("`{}` is not a known {}", s.trim(), $what)),
                }
            }
        }
    };
}

category!(
    /// The twelve asset categories.
    AssetCategory, "asset category" {
        Building => "building",
        Cabling => "cabling",
        ComputerCenter => "computercenter",
        DataMediaArchives => "datamediaarchives",
        Email => "email",
        Firewall => "firewall",
        Computers => "computers",
        Servers => "servers",
        MobileDevicesAndPhones => "mobiledevicesandphones",
        Routers => "routers",
        Software => "software",
        // Staff, listed in some sources as "Personal".
        Personnel => "personnel" | "personal",
    }
);

category!(
    ThreatCategory, "threat category" {
        Natural => "natural",
        Casual => "casual",
        Intentional => "intentional",
    }
);

category!(
    /// The eight vulnerability categories. A trailing "vulnerabilities" is accepted.
    VulnerabilityCategory, "vulnerability category" {
        Physical => "physical" | "physicalvulnerabilities",
        Natural => "natural" | "naturalvulnerabilities",
        HardwareAndSoftware => "hardwareandsoftware" | "hardwareandsoftwarevulnerabilities",
        Periphery => "periphery" | "peripheryvulnerabilities",
        Emission => "emission" | "emissionvulnerabilities",
        Communication => "communication" | "communicationvulnerabilities",
        Human => "human" | "humanvulnerabilities",
        OperationExploitation => "operationexploitation" | "operationexploitationvulnerabilities",
    }
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_sets() {
        assert_eq!(AssetCategory::ALL.len(), 12);
        assert_eq!(ThreatCategory::ALL.len(), 3);
        assert_eq!(VulnerabilityCategory::ALL.len(), 8);
        for c in AssetCategory::ALL {
            assert_eq!(c.as_str().parse::<AssetCategory>(), Ok(*c));
        }
        for c in VulnerabilityCategory::ALL {
            assert_eq!(c.as_str().parse::<VulnerabilityCategory>(), Ok(*c));
        }
    }

    #[test]
    fn display_names_and_aliases() {
        assert_eq!(
            "Mobile devices and phones".parse(),
            Ok(AssetCategory::MobileDevicesAndPhones)
        );
        assert_eq!("E-mail".parse(), Ok(AssetCategory::Email));
        assert_eq!("Personal".parse(), Ok(AssetCategory::Personnel));
        assert_eq!(
            "Emission vulnerabilities".parse(),
            Ok(VulnerabilityCategory::Emission)
        );
        assert!("Weather".parse::<ThreatCategory>().is_err());
        assert!("".parse::<AssetCategory>().is_err());
    }
}
