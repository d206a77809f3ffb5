# Este arquivo transforma o diretório src em um pacote Python
