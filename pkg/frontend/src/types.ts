// Wire types shared with the server API (see /api/v1 endpoints).

export interface FunctionCard {
  id: number;
  title: string;
  description: string;
}

export interface Character {
  id: number;
  name: string;
}

export interface Situation {
  id: number;
  title: string;
  description: string;
  image: string;
}

export interface CatalogDoc {
  schema_version: number;
  catalog_version: string;
  functions: FunctionCard[];
  characters: Character[];
  situations: Situation[];
}

export interface StoryFragment {
  function_id: number;
  text: string;
}

export interface StoryDoc {
  schema_version: number;
  id: string;
  title: string;
  situation_id: number;
  character_ids: number[];
  fragments: StoryFragment[];
  created_at: string;
  finalized: boolean;
}

export interface ClientConfig {
  require_ending: boolean;
}
